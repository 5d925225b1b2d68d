#include "forest/economics.hpp"

#include <cmath>
#include <stdexcept>

#include "forest/quadrature.hpp"

namespace forest {

namespace {

// Grid index of a time that must sit on the trajectory grid.
std::size_t grid_index(const Trajectory& traj, double t, const char* who) {
    double cells = t / traj.dt();
    double snapped = std::round(cells);
    if (std::abs(cells - snapped) > 1e-6)
        throw std::invalid_argument(std::string(who) + ": time must lie on the trajectory grid");
    auto k = static_cast<long long>(snapped);
    if (k < 0 || static_cast<std::size_t>(k) >= traj.size())
        throw std::invalid_argument(std::string(who) + ": time outside the trajectory span");
    return static_cast<std::size_t>(k);
}

}  // namespace

void EconomicParams::validate() const {
    if (!(discount_rate > 0.0))
        throw std::invalid_argument("EconomicParams: discount rate must be positive");
    if (replanting_cost < 0.0 || fixed_clearing_cost < 0.0 || damaged_clearing_cost < 0.0 ||
        survivor_clearing_cost < 0.0)
        throw std::invalid_argument("EconomicParams: costs must be non-negative");
}

double PriceModel::dp_ds(double s, double t) const {
    if (slope) return slope(s, t);
    double eps = 1e-7 * std::max(1.0, std::abs(s));
    return (value(s + eps, t) - value(s - eps, t)) / (2.0 * eps);
}

PriceModel eucalyptus_price() {
    PriceModel p;
    p.value = [](double s, double t) { return tree_price(s, t); };
    p.slope = [](double s, double t) {
        (void)s;
        return 0.1 * (127.8 + 0.32 * t) * eucalyptus_height(t);
    };
    return p;
}

PriceModel constant_price(double price) {
    PriceModel p;
    p.value = [price](double, double) { return price; };
    p.slope = [](double, double) { return 0.0; };
    return p;
}

RiskParams::RiskParams(double lambda, std::function<double(double)> alpha,
                       std::function<double(double)> alpha_p)
    : lambda_(lambda), alpha_(std::move(alpha)), alpha_p_(std::move(alpha_p)) {
    if (lambda_ < 0.0) throw std::invalid_argument("RiskParams: lambda < 0");
}

RiskParams RiskParams::none() {
    return RiskParams(0.0, [](double) { return 1.0; }, [](double) { return 1.0; });
}

RiskParams RiskParams::constant(double lambda, double alpha, double alpha_p) {
    if (!(0.0 <= alpha_p && alpha_p <= alpha && alpha <= 1.0))
        throw std::invalid_argument("RiskParams: need 0 <= alpha_p <= alpha <= 1");
    return RiskParams(lambda, [alpha](double) { return alpha; },
                      [alpha_p](double) { return alpha_p; });
}

RiskParams RiskParams::with_profiles(double lambda, std::function<double(double)> alpha,
                                     std::function<double(double)> alpha_p) {
    return RiskParams(lambda, std::move(alpha), std::move(alpha_p));
}

double RiskParams::alpha(double t) const {
    double a = alpha_(t);
    if (a < 0.0 || a > 1.0) throw std::domain_error("RiskParams: alpha(t) outside [0, 1]");
    return a;
}

double RiskParams::alpha_p(double t) const {
    double ap = alpha_p_(t);
    if (ap < 0.0 || ap > alpha(t) + 1e-12)
        throw std::domain_error("RiskParams: alpha_p(t) outside [0, alpha(t)]");
    return ap;
}

double RiskParams::clearing_coefficient(double t, const EconomicParams& econ) const {
    double a = alpha(t);
    return econ.damaged_clearing_cost * (1.0 - a) + econ.survivor_clearing_cost * a;
}

double tree_weight(double s, double t) {
    if (s < 0.0) throw std::domain_error("tree_weight: negative basal area");
    return 0.29 + (127.8 + 0.32 * t) * s * eucalyptus_height(t);
}

double tree_price(double s, double t) { return 0.1 * tree_weight(s, t) - 0.25; }

std::vector<double> discounted_thinning_cumulative(const Trajectory& traj,
                                                   const PriceModel& price, double rate) {
    const std::size_t n = traj.size();
    const double dt = traj.dt();
    std::vector<double> integrand(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& st = traj[k];
        integrand[k] = price.value(st.s, st.t) * st.n * std::exp(-rate * st.t);
    }
    // integrate piecewise between schedule breakpoints with the interval's
    // own rate, so the jump at a switch never crosses a stencil
    std::vector<double> out(n, 0.0);
    const auto& breaks = traj.schedule().breakpoints();
    const auto& rates = traj.schedule().rates();
    double offset = 0.0;
    std::size_t k0 = 0;
    for (std::size_t piece = 0; piece < rates.size() && k0 + 1 < n; ++piece) {
        double end = std::min(breaks[piece + 1], traj.horizon());
        auto k1 = static_cast<std::size_t>(std::llround(end / dt));
        if (k1 >= n) k1 = n - 1;
        if (k1 <= k0) continue;
        const double h = rates[piece];
        if (h == 0.0) {
            for (std::size_t k = k0 + 1; k <= k1; ++k) out[k] = offset;
        } else {
            std::vector<double> seg(integrand.begin() + static_cast<long>(k0),
                                    integrand.begin() + static_cast<long>(k1) + 1);
            for (double& v : seg) v *= h;
            auto cum = cumulative_integral(seg, dt);
            for (std::size_t k = k0 + 1; k <= k1; ++k) out[k] = offset + cum[k - k0];
        }
        offset = out[k1];
        k0 = k1;
    }
    for (std::size_t k = k0 + 1; k < n; ++k) out[k] = offset;
    return out;
}

double thinning_income(const Trajectory& traj, const PriceModel& price, double discount_rate,
                       double t) {
    std::size_t k = grid_index(traj, t, "thinning_income");
    if (traj.schedule().is_zero()) return 0.0;
    auto cum = discounted_thinning_cumulative(traj, price, discount_rate);
    return std::exp(discount_rate * t) * cum[k];
}

double final_income(double n, double s, double t, const PriceModel& price) {
    if (n < 0.0) throw std::invalid_argument("final_income: negative density");
    return price.value(s, t) * n;
}

double total_income(const Trajectory& traj, const PriceModel& price, double discount_rate,
                    double horizon) {
    double thin = thinning_income(traj, price, discount_rate, horizon);
    std::size_t k = grid_index(traj, horizon, "total_income");
    const auto& st = traj[k];
    return thin + final_income(st.n, st.s, st.t, price);
}

double land_value_norisk(double total_income, double replanting_cost, double discount_rate,
                         double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("land_value_norisk: horizon must be > 0");
    if (!(discount_rate > 0.0))
        throw std::invalid_argument("land_value_norisk: discount rate must be > 0");
    return (total_income - replanting_cost) / std::expm1(discount_rate * horizon);
}

ClearingCost expected_clearing_cost(double n, double t, const RiskParams& risk,
                                    const EconomicParams& econ) {
    if (n < 0.0) throw std::invalid_argument("expected_clearing_cost: negative density");
    double cn = risk.clearing_coefficient(t, econ);
    return {econ.fixed_clearing_cost + cn * n, cn};
}

double modified_income(const Trajectory& traj, const PriceModel& price,
                       const EconomicParams& econ, const RiskParams& risk, double horizon) {
    std::size_t kT = grid_index(traj, horizon, "modified_income");
    const double lambda = risk.lambda();
    const double rate = econ.discount_rate + lambda;

    double income = std::exp(rate * horizon) *
                    discounted_thinning_cumulative(traj, price, rate)[kT];
    if (lambda > 0.0) {
        // standing-value and clearing-cost expectations are continuous in t,
        // so they integrate over the whole span in one piece
        std::vector<double> integrand(kT + 1);
        for (std::size_t k = 0; k <= kT; ++k) {
            const auto& st = traj[k];
            double v0 = price.value(st.s, st.t) * st.n;
            double cn = risk.clearing_coefficient(st.t, econ);
            integrand[k] = (lambda * risk.alpha_p(st.t) * v0 - lambda * cn * st.n) *
                           std::exp(rate * (horizon - st.t));
        }
        income += integrate_uniform(integrand, traj.dt());
    }
    const auto& st = traj[kT];
    return income + final_income(st.n, st.s, st.t, price);
}

double land_value_risk(double modified_income, const EconomicParams& econ,
                       const RiskParams& risk, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("land_value_risk: horizon must be > 0");
    econ.validate();
    const double delta = econ.discount_rate;
    const double lambda = risk.lambda();
    double faustmann = (delta + lambda) / delta * (modified_income - econ.replanting_cost) /
                       std::expm1((delta + lambda) * horizon);
    return faustmann -
           lambda / delta * (econ.replanting_cost + econ.fixed_clearing_cost);
}

}  // namespace forest
