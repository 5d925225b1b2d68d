#include "forest/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "forest/quadrature.hpp"

namespace forest {

namespace {

struct SwitchingProfile {
    std::vector<double> pi;        // switching function at nodes
    std::vector<double> weight;    // exp(int_t^T (delta+lambda+m+h_bar))
    std::vector<double> integral;  // Pi at nodes
};

SwitchingProfile build_profile(const SwitchingContext& ctx) {
    const std::size_t n = ctx.nodes();
    SwitchingProfile p;
    p.pi.resize(n);
    p.weight.resize(n);

    std::vector<double> mort(n);
    for (std::size_t k = 0; k < n; ++k) mort[k] = ctx.mortality(ctx.time(k));
    auto mort_cum = cumulative_integral(mort, ctx.dt);

    const double rho = ctx.discount_rate + ctx.lambda + ctx.ceiling;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = ctx.time(k);
        p.pi[k] = ctx.price_rate[k] -
                  (ctx.discount_rate + ctx.lambda * (1.0 - ctx.alpha_p(t)) + mort[k]) *
                      ctx.price[k] -
                  ctx.lambda * ctx.clearing_coefficient(t);
        p.weight[k] = std::exp(rho * (ctx.horizon - t) + (mort_cum[n - 1] - mort_cum[k]));
    }
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = p.weight[k] * p.pi[k];
    auto cum = cumulative_integral(f, ctx.dt);
    p.integral.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.integral[k] = cum[n - 1] - cum[k];
    return p;
}

double lerp_nodes(const std::vector<double>& v, double t, double dt) {
    if (t <= 0.0) return v.front();
    double cells = t / dt;
    auto k = static_cast<std::size_t>(std::floor(cells));
    if (k >= v.size() - 1) return v.back();
    double u = cells - static_cast<double>(k);
    return (1.0 - u) * v[k] + u * v[k + 1];
}

}  // namespace

SwitchingContext SwitchingContext::from_trajectory(const Trajectory& traj,
                                                   const PriceModel& price,
                                                   const GrowthModel& model,
                                                   const EconomicParams& econ,
                                                   const RiskParams& risk, double ceiling) {
    SwitchingContext ctx;
    ctx.dt = traj.dt();
    ctx.horizon = traj.horizon();
    ctx.discount_rate = econ.discount_rate;
    ctx.lambda = risk.lambda();
    ctx.ceiling = ceiling;

    const std::size_t n = traj.size();
    ctx.price.resize(n);
    for (std::size_t k = 0; k < n; ++k) ctx.price[k] = price.value(traj[k].s, traj[k].t);

    ctx.price_rate.resize(n);
    const double dt = traj.dt();
    for (std::size_t k = 1; k + 1 < n; ++k)
        ctx.price_rate[k] = (ctx.price[k + 1] - ctx.price[k - 1]) / (2.0 * dt);
    ctx.price_rate[0] = (-3.0 * ctx.price[0] + 4.0 * ctx.price[1] - ctx.price[2]) / (2.0 * dt);
    ctx.price_rate[n - 1] =
        (3.0 * ctx.price[n - 1] - 4.0 * ctx.price[n - 2] + ctx.price[n - 3]) / (2.0 * dt);

    // capture by value so the context outlives its sources
    ctx.mortality = model.mortality;
    ctx.alpha_p = [r = risk](double t) { return r.alpha_p(t); };
    ctx.clearing_coefficient = [r = risk, e = econ](double t) {
        return r.clearing_coefficient(t, e);
    };
    return ctx;
}

double switching_function(const SwitchingContext& ctx, double t) {
    if (t < 0.0 || t > ctx.horizon * (1.0 + 1e-12))
        throw std::invalid_argument("switching_function: time outside [0, T]");
    double R = lerp_nodes(ctx.price, t, ctx.dt);
    double Rp = lerp_nodes(ctx.price_rate, t, ctx.dt);
    return Rp -
           (ctx.discount_rate + ctx.lambda * (1.0 - ctx.alpha_p(t)) + ctx.mortality(t)) * R -
           ctx.lambda * ctx.clearing_coefficient(t);
}

double switching_integral(const SwitchingContext& ctx, double t) {
    if (t < 0.0 || t > ctx.horizon * (1.0 + 1e-12))
        throw std::invalid_argument("switching_integral: time outside [0, T]");
    auto prof = build_profile(ctx);
    double cells = t / ctx.dt;
    auto k = static_cast<std::size_t>(std::floor(cells));
    if (k >= prof.integral.size() - 1) return prof.integral.back();
    double u = cells - static_cast<double>(k);
    if (u == 0.0) return prof.integral[k];
    // Hermite with the exact derivative dPi/dt = -w(t) pi(t)
    double f0 = prof.integral[k], f1 = prof.integral[k + 1];
    double d0 = -prof.weight[k] * prof.pi[k];
    double d1 = -prof.weight[k + 1] * prof.pi[k + 1];
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * f0 + h10 * ctx.dt * d0 + h01 * f1 + h11 * ctx.dt * d1;
}

ThinningSchedule SwitchDecision::schedule(double horizon, double ceiling, double dt) const {
    switch (policy) {
        case ThinningPolicy::no_thinning:
            return ThinningSchedule::none(horizon, ceiling);
        case ThinningPolicy::thin_always:
            return ThinningSchedule::constant_rate(ceiling, horizon, ceiling);
        case ThinningPolicy::thin_from: {
            double snapped = std::round(switch_time / dt) * dt;
            return ThinningSchedule::bang_bang(snapped, horizon, ceiling);
        }
        default:
            throw std::logic_error("SwitchDecision: no schedule for an indeterminate policy");
    }
}

SwitchDecision optimal_switch_time(const SwitchingContext& ctx) {
    auto prof = build_profile(ctx);
    const std::size_t n = prof.pi.size();
    SwitchDecision out;

    double scale = 0.0;
    for (double v : prof.pi) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * std::max(1.0, scale);
    out.monotone = true;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (prof.pi[k + 1] > prof.pi[k] + tol) {
            out.monotone = false;
            break;
        }
    }

    // count sign changes of Pi over the interior grid
    std::size_t sign_changes = 0;
    std::size_t change_at = 0;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        if (prof.integral[k] > 0.0 && prof.integral[k + 1] <= 0.0) {
            ++sign_changes;
            change_at = k;
        }
    }

    auto bisect_root = [&](std::size_t k) {
        double lo = ctx.time(k), hi = ctx.time(k + 1);
        double flo = prof.integral[k];
        while (hi - lo > 1e-4) {
            double mid = 0.5 * (lo + hi);
            double fm = switching_integral(ctx, mid);
            if ((flo > 0.0) == (fm > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    if (!out.monotone) {
        out.policy = ThinningPolicy::indeterminate;
        out.note =
            "switching function is not decreasing on the grid; the bang-bang "
            "characterization does not apply, use the brute-force search";
        if (prof.pi[n - 1] < 0.0 && prof.integral[0] > 0.0 && sign_changes == 1) {
            out.switch_time = bisect_root(change_at);
            out.note += "; best-effort switch time from the unique sign change of the "
                        "switching integral";
        } else {
            out.switch_time = std::nan("");
        }
        return out;
    }

    if (prof.pi[n - 1] >= 0.0) {
        out.policy = ThinningPolicy::no_thinning;
        out.switch_time = ctx.horizon;
        return out;
    }
    if (prof.integral[0] <= 0.0) {
        // the switching integral is negative on the whole horizon: the
        // indicator never favours keeping, thin from the start
        out.policy = ThinningPolicy::thin_always;
        out.switch_time = 0.0;
        return out;
    }
    if (sign_changes != 1) {
        out.policy = ThinningPolicy::indeterminate;
        out.note = "switching integral has no unique sign change despite decreasing pi";
        out.switch_time = std::nan("");
        return out;
    }
    out.policy = ThinningPolicy::thin_from;
    out.switch_time = bisect_root(change_at);
    return out;
}

AdjointTrajectory adjoint_backward(const Trajectory& traj, const PriceModel& price,
                                   const EconomicParams& econ, const RiskParams& risk,
                                   const GrowthModel& model) {
    const std::size_t n = traj.size();
    const double dt = traj.dt();
    const double T = traj.horizon();
    const double lambda = risk.lambda();
    const double rate = econ.discount_rate + lambda;
    const auto& schedule = traj.schedule();

    AdjointTrajectory adj;
    adj.dt = dt;
    adj.adjoint_n.resize(n);
    adj.adjoint_s.resize(n);
    adj.indicator.resize(n);

    const auto& last = traj.back();
    double mu_n = price.value(last.s, T);
    double mu_s = price.dp_ds(last.s, T) * last.n;
    adj.adjoint_n[n - 1] = mu_n;
    adj.adjoint_s[n - 1] = mu_s;
    adj.indicator[n - 1] = 0.0;

    auto rhs = [&](double t, double mn, double ms, double h, const StandState& st,
                   double* dmn, double* dms) {
        const double p = price.value(st.s, t);
        const double ps = price.dp_ds(st.s, t);
        const double e = std::exp(rate * (T - t));
        const double cn = lambda > 0.0 ? risk.clearing_coefficient(t, econ) : 0.0;
        const double ap = lambda > 0.0 ? risk.alpha_p(t) : 0.0;
        const double m = model.mortality(t);
        *dmn = -(p * h + lambda * (ap * p - cn)) * e + mn * (m + h) -
               ms * model.dG_dn(st.n, st.s, t);
        *dms = -(ps * h + lambda * ap * ps) * st.n * e - ms * model.dG_ds(st.n, st.s, t);
    };

    for (std::size_t k = n - 1; k > 0; --k) {
        const double t1 = traj[k].t;
        const double t0 = traj[k - 1].t;
        const double h = schedule.rate_at(t0 + 0.5 * dt);
        const StandState mid = traj.state_at(t0 + 0.5 * dt);

        double k1n, k1s, k2n, k2s, k3n, k3s, k4n, k4s;
        rhs(t1, mu_n, mu_s, h, traj[k], &k1n, &k1s);
        rhs(t1 - 0.5 * dt, mu_n - 0.5 * dt * k1n, mu_s - 0.5 * dt * k1s, h, mid, &k2n, &k2s);
        rhs(t1 - 0.5 * dt, mu_n - 0.5 * dt * k2n, mu_s - 0.5 * dt * k2s, h, mid, &k3n, &k3s);
        rhs(t0, mu_n - dt * k3n, mu_s - dt * k3s, h, traj[k - 1], &k4n, &k4s);

        mu_n -= dt / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
        mu_s -= dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        adj.adjoint_n[k - 1] = mu_n;
        adj.adjoint_s[k - 1] = mu_s;
        adj.indicator[k - 1] =
            price.value(traj[k - 1].s, t0) * std::exp(rate * (T - t0)) - mu_n;
    }
    return adj;
}

ConsistencyReport verify_bang_bang(const AdjointTrajectory& adj,
                                   const ThinningSchedule& schedule, double band) {
    if (std::abs(schedule.horizon() - adj.horizon()) > 1e-6)
        throw std::invalid_argument("verify_bang_bang: schedule and adjoint horizons differ");
    for (double b : schedule.breakpoints()) {
        double cells = b / adj.dt;
        if (b < schedule.horizon() && std::abs(cells - std::round(cells)) > 1e-6)
            throw std::invalid_argument("verify_bang_bang: schedule breakpoint off the grid");
    }
    ConsistencyReport rep;
    rep.band = band;
    const double ceiling = schedule.ceiling();
    const double tiny = 1e-12;
    for (std::size_t k = 0; k < adj.size(); ++k) {
        const double t = adj.time(k);
        const double l = adj.indicator[k];
        const double h =
            k + 1 == adj.size() ? schedule.rate_at(t - 0.5 * adj.dt) : schedule.rate_at(t);
        ++rep.checked;
        bool bad = (l > band && h < ceiling - tiny) || (l < -band && h > tiny);
        if (bad) {
            ++rep.violations;
            rep.max_violation = std::max(rep.max_violation, std::abs(l));
        }
    }
    rep.violation_fraction =
        rep.checked ? static_cast<double>(rep.violations) / static_cast<double>(rep.checked) : 0.0;
    return rep;
}

bool power_price_terminal_thinning(const Trajectory& traj, const PriceModel& price,
                                   double coefficient, double exponent,
                                   const GrowthModel& model, const EconomicParams& econ,
                                   const RiskParams& risk) {
    const auto& last = traj.back();
    const double T = last.t;
    const double s_ref = std::max(last.s, 1e-6);
    for (double f : {0.5, 1.0, 1.5}) {
        double s = f * s_ref;
        double expect = coefficient * std::pow(s, exponent);
        double got = price.value(s, T);
        if (std::abs(got - expect) > 1e-6 * std::max(1.0, std::abs(expect)))
            throw std::invalid_argument(
                "power_price_terminal_thinning: price model is not the power law C s^a");
    }
    // d/dn of G(n,s,t) n by central differences at the cutting age
    const double n = last.n;
    const double eps = 1e-5 * std::max(1.0, n);
    double up = model.growth(n + eps, last.s, T) * (n + eps);
    double dn = model.growth(n - eps, last.s, T) * (n - eps);
    double gn_prime = (up - dn) / (2.0 * eps);

    double lhs = exponent * gn_prime;
    double rhs = (econ.discount_rate + risk.lambda() * (1.0 - risk.alpha_p(T)) +
                  model.mortality(T)) *
                 traj[0].s;
    return lhs <= rhs;
}

void write_switching_csv(const SwitchingContext& ctx, const AdjointTrajectory* adj,
                         std::ostream& out) {
    auto prof = build_profile(ctx);
    out << "t,pi,Pi,l\n";
    char line[128];
    for (std::size_t k = 0; k < prof.pi.size(); ++k) {
        if (adj && adj->size() == prof.pi.size())
            std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g\n", ctx.time(k),
                          prof.pi[k], prof.integral[k], adj->indicator[k]);
        else
            std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,\n", ctx.time(k), prof.pi[k],
                          prof.integral[k]);
        out << line;
    }
}

}  // namespace forest
