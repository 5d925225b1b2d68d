#include "forest/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace forest {

namespace {

constexpr double kGridTol = 1e-9;

bool on_grid(double t, double dt) {
    double cells = t / dt;
    return std::abs(cells - std::round(cells)) <= kGridTol * std::max(1.0, std::abs(cells));
}

double hermite(double f0, double f1, double d0, double d1, double dt, double u) {
    // cubic Hermite on [0,1] with slopes scaled by the interval width
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * f0 + h10 * dt * d0 + h01 * f1 + h11 * dt * d1;
}

}  // namespace

ThinningSchedule::ThinningSchedule(std::vector<double> breakpoints, std::vector<double> rates,
                                   double ceiling)
    : breakpoints_(std::move(breakpoints)), rates_(std::move(rates)), ceiling_(ceiling) {
    if (ceiling_ < 0.0) throw std::invalid_argument("ThinningSchedule: ceiling < 0");
    if (breakpoints_.size() < 2 || rates_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("ThinningSchedule: need k+1 breakpoints for k rates");
    if (breakpoints_.front() != 0.0)
        throw std::invalid_argument("ThinningSchedule: first breakpoint must be 0");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw std::invalid_argument("ThinningSchedule: breakpoints must increase strictly");
    for (double r : rates_)
        if (r < 0.0 || r > ceiling_ * (1.0 + 1e-12))
            throw std::invalid_argument("ThinningSchedule: rate outside [0, ceiling]");
}

ThinningSchedule ThinningSchedule::none(double horizon, double ceiling) {
    return ThinningSchedule({0.0, horizon}, {0.0}, ceiling);
}

ThinningSchedule ThinningSchedule::constant_rate(double rate, double horizon, double ceiling) {
    return ThinningSchedule({0.0, horizon}, {rate}, ceiling);
}

ThinningSchedule ThinningSchedule::bang_bang(double switch_time, double horizon, double ceiling) {
    if (switch_time <= 0.0) return constant_rate(ceiling, horizon, ceiling);
    if (switch_time >= horizon) return none(horizon, ceiling);
    return ThinningSchedule({0.0, switch_time, horizon}, {0.0, ceiling}, ceiling);
}

ThinningSchedule ThinningSchedule::piecewise(const std::vector<double>& cell_rates,
                                             double horizon, double ceiling) {
    if (cell_rates.empty()) throw std::invalid_argument("piecewise: no cells");
    // merge equal-rate neighbours
    std::vector<double> breaks{0.0};
    std::vector<double> rates;
    const double w = horizon / static_cast<double>(cell_rates.size());
    for (std::size_t i = 0; i < cell_rates.size(); ++i) {
        if (rates.empty() || cell_rates[i] != rates.back()) {
            if (i > 0) breaks.push_back(w * static_cast<double>(i));
            rates.push_back(cell_rates[i]);
        }
    }
    breaks.push_back(horizon);
    return ThinningSchedule(std::move(breaks), std::move(rates), ceiling);
}

double ThinningSchedule::rate_at(double t) const {
    if (t < 0.0) throw std::invalid_argument("rate_at: negative time");
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    if (idx == 0) return rates_.front();
    if (idx >= breakpoints_.size()) return rates_.back();
    return rates_[idx - 1];
}

double ThinningSchedule::first_thinning_time() const {
    for (std::size_t i = 0; i < rates_.size(); ++i)
        if (rates_[i] > 0.0) return breakpoints_[i];
    return horizon();
}

bool ThinningSchedule::is_bang_bang() const {
    bool seen_positive = false;
    for (double r : rates_) {
        if (r == 0.0) {
            if (seen_positive) return false;
        } else if (r == ceiling_) {
            seen_positive = true;
        } else {
            return false;
        }
    }
    return true;
}

bool ThinningSchedule::is_zero() const {
    return std::all_of(rates_.begin(), rates_.end(), [](double r) { return r == 0.0; });
}

double GrowthModel::dG_dn(double n, double s, double t) const {
    if (growth_dn) return growth_dn(n, s, t);
    double eps = 1e-6 * std::max(1.0, std::abs(n));
    return (growth(n + eps, s, t) - growth(n - eps, s, t)) / (2.0 * eps);
}

double GrowthModel::dG_ds(double n, double s, double t) const {
    if (growth_ds) return growth_ds(n, s, t);
    double eps = 1e-8 * std::max(1.0, std::abs(s));
    return (growth(n, s + eps, t) - growth(n, s - eps, t)) / (2.0 * eps);
}

double eucalyptus_height(double t) {
    if (t < 0.0) throw std::domain_error("eucalyptus_height: negative age");
    return 30.0 * (1.0 - std::exp(-t / 30.0));
}

double eucalyptus_height_rate(double t) {
    if (t < 0.0) throw std::domain_error("eucalyptus_height_rate: negative age");
    return std::exp(-t / 30.0);
}

double eucalyptus_growth(double n, double s, double t) {
    if (n <= 0.0) throw std::domain_error("eucalyptus_growth: density must be positive");
    if (s < 0.0) throw std::domain_error("eucalyptus_growth: negative basal area");
    if (t < 0.0) throw std::domain_error("eucalyptus_growth: negative age");
    return 0.7445 * (1.0 - std::exp(-0.482 * n * s)) / n * eucalyptus_height_rate(t);
}

GrowthModel eucalyptus_model(double mortality_rate) {
    GrowthModel g;
    g.growth = [](double n, double s, double t) { return eucalyptus_growth(n, s, t); };
    g.mortality = [mortality_rate](double) { return mortality_rate; };
    g.density_dependent = true;
    g.growth_dn = [](double n, double s, double t) {
        double u = 0.482 * n * s;
        double e = std::exp(-u);
        return 0.7445 * eucalyptus_height_rate(t) *
               (0.482 * s * e / n - (1.0 - e) / (n * n));
    };
    g.growth_ds = [](double n, double s, double t) {
        return 0.7445 * 0.482 * std::exp(-0.482 * n * s) * eucalyptus_height_rate(t);
    };
    return g;
}

GrowthModel density_free_model(std::function<double(double s, double t)> growth,
                               std::function<double(double t)> mortality) {
    GrowthModel g;
    auto fn = std::move(growth);
    g.growth = [fn](double, double s, double t) { return fn(s, t); };
    g.mortality = std::move(mortality);
    g.density_dependent = false;
    g.growth_dn = [](double, double, double) { return 0.0; };
    g.growth_ds = [fn](double, double s, double t) {
        double eps = 1e-8 * std::max(1.0, std::abs(s));
        return (fn(s + eps, t) - fn(s - eps, t)) / (2.0 * eps);
    };
    return g;
}

Trajectory::Trajectory(double dt, std::vector<StandState> samples, ThinningSchedule schedule,
                       std::vector<double> slope_n_begin, std::vector<double> slope_n_end,
                       std::vector<double> slope_s_begin, std::vector<double> slope_s_end)
    : dt_(dt),
      samples_(std::move(samples)),
      schedule_(std::move(schedule)),
      slope_n_begin_(std::move(slope_n_begin)),
      slope_n_end_(std::move(slope_n_end)),
      slope_s_begin_(std::move(slope_s_begin)),
      slope_s_end_(std::move(slope_s_end)) {
    if (samples_.size() < 2) throw std::invalid_argument("Trajectory: too few samples");
    if (slope_n_begin_.size() + 1 != samples_.size())
        throw std::invalid_argument("Trajectory: slope arrays must have one entry per interval");
}

StandState Trajectory::state_at(double t) const {
    const double T = horizon();
    if (t < -kGridTol || t > T * (1.0 + kGridTol) + kGridTol)
        throw std::out_of_range("Trajectory::state_at: time outside span");
    t = std::clamp(t, 0.0, T);
    auto k = static_cast<std::size_t>(std::floor(t / dt_));
    if (k >= samples_.size() - 1) k = samples_.size() - 2;
    double u = (t - samples_[k].t) / dt_;
    u = std::clamp(u, 0.0, 1.0);
    StandState out;
    out.t = t;
    out.n = hermite(samples_[k].n, samples_[k + 1].n, slope_n_begin_[k], slope_n_end_[k], dt_, u);
    out.s = hermite(samples_[k].s, samples_[k + 1].s, slope_s_begin_[k], slope_s_end_[k], dt_, u);
    return out;
}

void Trajectory::write_csv(std::ostream& out) const {
    out << "t,n,s\n";
    char line[96];
    for (const auto& st : samples_) {
        std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g\n", st.t, st.n, st.s);
        out << line;
    }
}

Trajectory simulate(const StandState& initial, const GrowthModel& model,
                    const ThinningSchedule& schedule, double horizon, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be positive");
    if (horizon <= 0.0) throw std::invalid_argument("simulate: horizon must be positive");
    if (!on_grid(horizon, dt))
        throw std::invalid_argument("simulate: horizon must be a multiple of dt");
    if (schedule.horizon() < horizon - kGridTol)
        throw std::invalid_argument("simulate: schedule does not cover the horizon");
    for (double b : schedule.breakpoints())
        if (b < horizon && !on_grid(b, dt))
            throw std::invalid_argument(
                "simulate: schedule breakpoint off the integration grid (would smear the control)");
    if (initial.n < 0.0 || initial.s < 0.0)
        throw std::invalid_argument("simulate: negative initial state");

    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    std::vector<StandState> samples;
    samples.reserve(steps + 1);
    std::vector<double> snb(steps), sne(steps), ssb(steps), sse(steps);

    double n = initial.n;
    double s = initial.s;
    samples.push_back({0.0, n, s});

    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * dt;
        const double h = schedule.rate_at(t0 + 0.5 * dt);  // constant within the step
        auto rate_n = [&](double t, double nn, double ss) {
            (void)ss;
            return -(model.mortality(t) + h) * nn;
        };
        auto rate_s = [&](double t, double nn, double ss) { return model.growth(nn, ss, t); };

        double k1n = rate_n(t0, n, s), k1s = rate_s(t0, n, s);
        double k2n = rate_n(t0 + 0.5 * dt, n + 0.5 * dt * k1n, s + 0.5 * dt * k1s);
        double k2s = rate_s(t0 + 0.5 * dt, n + 0.5 * dt * k1n, s + 0.5 * dt * k1s);
        double k3n = rate_n(t0 + 0.5 * dt, n + 0.5 * dt * k2n, s + 0.5 * dt * k2s);
        double k3s = rate_s(t0 + 0.5 * dt, n + 0.5 * dt * k2n, s + 0.5 * dt * k2s);
        double k4n = rate_n(t0 + dt, n + dt * k3n, s + dt * k3s);
        double k4s = rate_s(t0 + dt, n + dt * k3n, s + dt * k3s);

        snb[k] = k1n;
        ssb[k] = k1s;
        n += dt / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
        s += dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        const double t1 = static_cast<double>(k + 1) * dt;
        sne[k] = rate_n(t1, n, s);
        sse[k] = rate_s(t1, n, s);
        samples.push_back({t1, n, s});
    }
    return Trajectory(dt, std::move(samples), schedule, std::move(snb), std::move(sne),
                      std::move(ssb), std::move(sse));
}

std::vector<std::pair<double, double>> simulate_stand_aggregate(
    double S0, const std::function<double(double)>& g0,
    const std::function<double(double)>& seasonal,
    const std::function<double(double)>& mortality,
    const ThinningSchedule& schedule, double horizon, double dt) {
    if (dt <= 0.0 || horizon <= 0.0 || !on_grid(horizon, dt))
        throw std::invalid_argument("simulate_stand_aggregate: bad horizon/dt");
    for (double b : schedule.breakpoints())
        if (b < horizon && !on_grid(b, dt))
            throw std::invalid_argument("simulate_stand_aggregate: breakpoint off the grid");

    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    std::vector<std::pair<double, double>> out;
    out.reserve(steps + 1);
    double S = S0;
    out.emplace_back(0.0, S);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * dt;
        const double h = schedule.rate_at(t0 + 0.5 * dt);
        auto f = [&](double t, double x) {
            return g0(x) * seasonal(t) - (mortality(t) + h) * x;
        };
        double k1 = f(t0, S);
        double k2 = f(t0 + 0.5 * dt, S + 0.5 * dt * k1);
        double k3 = f(t0 + 0.5 * dt, S + 0.5 * dt * k2);
        double k4 = f(t0 + dt, S + dt * k3);
        S += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.emplace_back(static_cast<double>(k + 1) * dt, S);
    }
    return out;
}

}  // namespace forest
