#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "forest/dynamics.hpp"
#include "forest/economics.hpp"

namespace forest {

// Inputs of the switching analysis for density-independent growth: the
// price R(t) = p(s(t), t) along the unthinned trajectory, its derivative,
// and the rates entering the switching function.
struct SwitchingContext {
    double dt = 0.0;
    double horizon = 0.0;
    std::vector<double> price;       // R at grid nodes
    std::vector<double> price_rate;  // R' by central differences
    std::function<double(double)> mortality;
    std::function<double(double)> alpha_p;
    std::function<double(double)> clearing_coefficient;  // c_n(t)
    double discount_rate = 0.0;
    double lambda = 0.0;
    double ceiling = 0.0;  // h_bar

    static SwitchingContext from_trajectory(const Trajectory& traj, const PriceModel& price,
                                            const GrowthModel& model, const EconomicParams& econ,
                                            const RiskParams& risk, double ceiling);
    std::size_t nodes() const { return price.size(); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt; }
};

// pi(t) = R'(t) - (delta + lambda (1 - alpha_p(t)) + m(t)) R(t) - lambda c_n(t)
double switching_function(const SwitchingContext& ctx, double t);

// Pi(t) = int_t^T exp(int_u^T (delta+lambda+m+h_bar)) pi(u) du; Pi(T) = 0.
double switching_integral(const SwitchingContext& ctx, double t);

enum class ThinningPolicy {
    no_thinning,       // h = 0 throughout
    thin_from,         // h = 0 then h_bar from switch_time
    thin_always,       // h = h_bar throughout
    indeterminate,     // hypotheses violated; use the brute-force search
};

struct SwitchDecision {
    ThinningPolicy policy = ThinningPolicy::indeterminate;
    double switch_time = 0.0;     // meaningful for thin_from (0 / horizon otherwise)
    bool monotone = false;        // pi verified decreasing on the grid
    std::string note;

    ThinningSchedule schedule(double horizon, double ceiling, double dt) const;
};

// Switch structure for a decreasing switching function: no thinning when
// pi(T) >= 0; thin from t* where Pi crosses zero when Pi(0) > 0; thin from
// the start when Pi <= 0 everywhere. Non-monotone pi is reported, not
// silently accepted; a unique Pi sign change still yields a best-effort
// switch time in that case.
SwitchDecision optimal_switch_time(const SwitchingContext& ctx);

// Costate trajectories of the two-adjoint system and the switching
// indicator l(t) = p(s(t),t) e^{(delta+lambda)(T-t)} - adjoint_n(t).
struct AdjointTrajectory {
    double dt = 0.0;
    std::vector<double> adjoint_n;  // multiplier of the density equation
    std::vector<double> adjoint_s;  // multiplier of the basal-area equation
    std::vector<double> indicator;  // l(t); l(T) = 0 by transversality

    std::size_t size() const { return indicator.size(); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt; }
    double horizon() const { return time(size() - 1); }
};

// Integrates the adjoint ODEs backward from the transversality conditions
// adjoint_n(T) = p(s(T)), adjoint_s(T) = p'(s(T)) n(T) on the trajectory's
// own grid with the same RK4 step.
AdjointTrajectory adjoint_backward(const Trajectory& traj, const PriceModel& price,
                                   const EconomicParams& econ, const RiskParams& risk,
                                   const GrowthModel& model);

struct ConsistencyReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double violation_fraction = 0.0;
    double band = 1e-6;
    double max_violation = 0.0;  // largest |l| among violating nodes
};

// Fraction of grid nodes where the control contradicts the sign of l(t):
// l > band requires the full rate, l < -band requires none. Nodes with
// |l| <= band are exempt, so an interior rate is admissible only there.
ConsistencyReport verify_bang_bang(const AdjointTrajectory& adj,
                                   const ThinningSchedule& schedule, double band = 1e-6);

// Sufficient condition for full-rate thinning to be optimal near the
// cutting age when the price is the power law p(s) = C s^a:
//   a (G(n,s,t) n)'_n <= (delta + lambda (1-alpha_p(T)) + m(T)) s(0) at T.
// The derivative in n is taken by central differences. A price model that
// does not match C s^a is rejected with std::invalid_argument.
bool power_price_terminal_thinning(const Trajectory& traj, const PriceModel& price,
                                   double coefficient, double exponent,
                                   const GrowthModel& model, const EconomicParams& econ,
                                   const RiskParams& risk);

// CSV dump of (t, pi, Pi, l) for plotting the switching structure; the
// adjoint column is omitted when adj is null.
void write_switching_csv(const SwitchingContext& ctx, const AdjointTrajectory* adj,
                         std::ostream& out);

}  // namespace forest
