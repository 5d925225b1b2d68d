#pragma once

#include <cstdint>
#include <cstddef>

#include "forest/dynamics.hpp"
#include "forest/optimize.hpp"

namespace forest {

// Event-time distribution F(x) = 1 - e^{-lambda x}.
double event_cdf(double x, double lambda);

// E(min(X, T)) = F(T) / lambda for X ~ Exp(lambda); T when lambda = 0.
double expected_effective_age(double horizon, double lambda);

// Var(min(X, T)) = 2/lambda^2 (1-F(T)) (F(T) - lambda T) + F(T)^2 / lambda^2.
double variance_effective_age(double horizon, double lambda);

struct BasalAreaStats {
    double mean = 0.0;           // E s(min(X, T))
    double second_moment = 0.0;  // E s^2(min(X, T))
    double variance = 0.0;       // second_moment - mean^2
};
BasalAreaStats effective_basal_area_stats(const Trajectory& traj, double lambda);

struct EffectiveStats {
    double expected_age = 0.0;
    double age_variance = 0.0;
    double expected_basal_area = 0.0;
    double basal_area_second_moment = 0.0;
    double basal_area_variance = 0.0;
};
EffectiveStats effective_stats(const Trajectory& traj, double lambda);

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

// Monte Carlo land value from the renewal equation
//   W0 = E[(W0 + payoff(X)) e^{-delta min(X,T)}],
// solved through its linearity in W0: with A = E[payoff e^{-delta min}] and
// B = E[e^{-delta min}], W0 = A / (1 - B). Event times are i.i.d.
// exponential draws from a counter-based generator, so the estimate is
// independent of batching and fully reproducible from the seed. Throws when
// B >= 1 (non-contractive configuration) or samples < 1000.
MonteCarloEstimate monte_carlo_land_value(const Problem& problem,
                                          const ThinningSchedule& schedule,
                                          double horizon, std::size_t samples,
                                          std::uint64_t seed);

namespace rng {
// SplitMix64-style counter generator: value i of a stream is a pure
// function of (seed, i).
std::uint64_t mix(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t index);    // [0, 1)
double exponential(std::uint64_t seed, std::uint64_t index, double lambda);
}  // namespace rng

}  // namespace forest
