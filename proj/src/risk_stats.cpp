#include "forest/risk_stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "forest/quadrature.hpp"

namespace forest {

namespace rng {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = mix(seed + 0x9E3779B97F4A7C15ull * (index + 1));
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double exponential(std::uint64_t seed, std::uint64_t index, double lambda) {
    if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
    double u = uniform01(seed, index);
    return -std::log1p(-u) / lambda;
}

}  // namespace rng

double event_cdf(double x, double lambda) {
    if (x < 0.0) throw std::domain_error("event_cdf: negative time");
    if (lambda < 0.0) throw std::domain_error("event_cdf: negative intensity");
    return -std::expm1(-lambda * x);
}

double expected_effective_age(double horizon, double lambda) {
    if (!(horizon > 0.0)) throw std::domain_error("expected_effective_age: horizon must be > 0");
    if (lambda == 0.0) return horizon;
    return event_cdf(horizon, lambda) / lambda;
}

double variance_effective_age(double horizon, double lambda) {
    if (!(horizon > 0.0)) throw std::domain_error("variance_effective_age: horizon must be > 0");
    if (lambda == 0.0) return 0.0;
    double F = event_cdf(horizon, lambda);
    return 2.0 / (lambda * lambda) * (1.0 - F) * (F - lambda * horizon) +
           F * F / (lambda * lambda);
}

BasalAreaStats effective_basal_area_stats(const Trajectory& traj, double lambda) {
    const std::size_t n = traj.size();
    const double T = traj.horizon();
    BasalAreaStats out;
    const double sT = traj.back().s;
    if (lambda == 0.0) {
        out.mean = sT;
        out.second_moment = sT * sT;
        out.variance = 0.0;
        return out;
    }
    std::vector<double> f1(n), f2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& st = traj[k];
        double density = lambda * std::exp(-lambda * st.t);  // dF
        f1[k] = st.s * density;
        f2[k] = st.s * st.s * density;
    }
    double tail = std::exp(-lambda * T);
    out.mean = integrate_uniform(f1, traj.dt()) + sT * tail;
    out.second_moment = integrate_uniform(f2, traj.dt()) + sT * sT * tail;
    out.variance = out.second_moment - out.mean * out.mean;
    return out;
}

EffectiveStats effective_stats(const Trajectory& traj, double lambda) {
    EffectiveStats out;
    out.expected_age = expected_effective_age(traj.horizon(), lambda);
    out.age_variance = variance_effective_age(traj.horizon(), lambda);
    auto s = effective_basal_area_stats(traj, lambda);
    out.expected_basal_area = s.mean;
    out.basal_area_second_moment = s.second_moment;
    out.basal_area_variance = s.variance;
    return out;
}

MonteCarloEstimate monte_carlo_land_value(const Problem& problem,
                                          const ThinningSchedule& schedule, double horizon,
                                          std::size_t samples, std::uint64_t seed) {
    if (samples < 1000)
        throw std::invalid_argument("monte_carlo_land_value: need at least 1000 samples");
    problem.econ.validate();

    const double delta = problem.econ.discount_rate;
    const double lambda = problem.risk.lambda();
    const double c1 = problem.econ.replanting_cost;

    auto traj = problem.run(schedule, horizon);
    // discounted thinning income and total income at the horizon
    auto cumulative = discounted_thinning_cumulative(traj, problem.price, delta);
    const auto& last = traj.back();
    const double income_T = std::exp(delta * horizon) * cumulative.back() +
                            final_income(last.n, last.s, horizon, problem.price);

    auto thinning_at = [&](double t) {
        // linear interpolation of the present-value cumulative
        double cells = t / traj.dt();
        auto k = static_cast<std::size_t>(std::floor(cells));
        if (k >= cumulative.size() - 1) return cumulative.back();
        double u = cells - static_cast<double>(k);
        return (1.0 - u) * cumulative[k] + u * cumulative[k + 1];
    };

    double sum_p = 0.0, sum_d = 0.0, sum_pp = 0.0, sum_dd = 0.0, sum_pd = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double x = rng::exponential(seed, i, lambda);
        double payoff, discount;
        if (x <= horizon) {
            StandState st = traj.state_at(x);
            double v0 = final_income(st.n, st.s, x, problem.price);
            double thin = std::exp(delta * x) * thinning_at(x);
            auto clearing = expected_clearing_cost(st.n, x, problem.risk, problem.econ);
            double ap = problem.risk.alpha_p(x);
            discount = std::exp(-delta * x);
            payoff = (thin + ap * v0 - c1 - clearing.expected_total) * discount;
        } else {
            discount = std::exp(-delta * horizon);
            payoff = (income_T - c1) * discount;
        }
        sum_p += payoff;
        sum_d += discount;
        sum_pp += payoff * payoff;
        sum_dd += discount * discount;
        sum_pd += payoff * discount;
    }
    const double inv_n = 1.0 / static_cast<double>(samples);
    const double A = sum_p * inv_n;
    const double B = sum_d * inv_n;
    if (B >= 1.0)
        throw DiagnosticError("monte_carlo_land_value: non-contractive configuration (B >= 1)");

    const double nn = static_cast<double>(samples);
    const double var_a = (sum_pp - nn * A * A) / (nn - 1.0) * inv_n;
    const double var_b = (sum_dd - nn * B * B) / (nn - 1.0) * inv_n;
    const double cov_ab = (sum_pd - nn * A * B) / (nn - 1.0) * inv_n;
    const double da = 1.0 / (1.0 - B);
    const double db = A / ((1.0 - B) * (1.0 - B));

    MonteCarloEstimate est;
    est.value = A / (1.0 - B);
    est.standard_error =
        std::sqrt(std::max(0.0, da * da * var_a + db * db * var_b + 2.0 * da * db * cov_ab));
    est.samples = samples;
    return est;
}

}  // namespace forest
