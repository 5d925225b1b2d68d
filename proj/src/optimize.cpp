#include "forest/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forest/risk_stats.hpp"

namespace forest {

namespace {

double snap(double t, double dt) { return std::round(t / dt) * dt; }

// switch-time candidates for the bang-bang family, descending so ties
// resolve toward the later switch (less thinning)
std::vector<double> descending_candidates(double lo, double hi, double step, double horizon) {
    std::vector<double> out;
    for (double t = hi; t >= lo - 1e-9; t -= step) out.push_back(std::clamp(t, 0.0, horizon));
    return out;
}

}  // namespace

void Problem::validate() const {
    econ.validate();
    if (initial_density < 0.0 || initial_basal_area < 0.0)
        throw std::invalid_argument("Problem: negative initial state");
    if (!(ceiling > 0.0)) throw std::invalid_argument("Problem: thinning ceiling must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("Problem: dt must be > 0");
    if (!(T_step > 0.0)) throw std::invalid_argument("Problem: T_step must be > 0");
    if (!(T_min > 0.0) || T_max < T_min)
        throw std::invalid_argument("Problem: empty or invalid horizon range");
}

Trajectory Problem::run(const ThinningSchedule& schedule, double horizon) const {
    return simulate({0.0, initial_density, initial_basal_area}, model, schedule, horizon, dt);
}

double Problem::schedule_value(const Trajectory& traj) const {
    return modified_income(traj, price, econ, risk, traj.horizon());
}

double Problem::schedule_value(const ThinningSchedule& schedule, double horizon) const {
    return schedule_value(run(schedule, horizon));
}

double Problem::land_value(double inner_value, double horizon) const {
    return land_value_risk(inner_value, econ, risk, horizon);
}

InnerSolution inner_max(double horizon, const Problem& problem) {
    if (problem.family == ControlFamily::none) {
        auto schedule = ThinningSchedule::none(horizon, problem.ceiling);
        return {schedule, problem.schedule_value(schedule, horizon)};
    }
    if (problem.family == ControlFamily::free_grid) {
        return brute_force_control(horizon, problem, 0.5);
    }

    const double coarse = std::max(0.5, problem.dt);
    double best_switch = horizon;
    double best_value = 0.0;
    bool first = true;
    for (double cand : descending_candidates(0.0, horizon, coarse, horizon)) {
        double t_star = snap(cand, problem.dt);
        double value = problem.schedule_value(
            ThinningSchedule::bang_bang(t_star, horizon, problem.ceiling), horizon);
        if (first || value > best_value) {
            best_value = value;
            best_switch = t_star;
            first = false;
        }
    }
    // refine at the integration step around the coarse winner
    double lo = std::max(0.0, best_switch - coarse);
    double hi = std::min(horizon, best_switch + coarse);
    for (double cand : descending_candidates(lo, hi, problem.dt, horizon)) {
        double t_star = snap(cand, problem.dt);
        double value = problem.schedule_value(
            ThinningSchedule::bang_bang(t_star, horizon, problem.ceiling), horizon);
        if (value > best_value) {
            best_value = value;
            best_switch = t_star;
        }
    }
    return {ThinningSchedule::bang_bang(best_switch, horizon, problem.ceiling), best_value};
}

InnerSolution brute_force_control(double horizon, const Problem& problem, double cell_months,
                                  SearchMode mode) {
    if (!(cell_months > 0.0)) throw std::invalid_argument("brute_force_control: bad cell width");
    double cells_d = horizon / cell_months;
    auto cells = static_cast<std::size_t>(std::llround(cells_d));
    if (std::abs(cells_d - static_cast<double>(cells)) > 1e-9 || cells == 0)
        throw std::invalid_argument("brute_force_control: cell width must divide the horizon");

    bool exhaustive = mode == SearchMode::exhaustive ||
                      (mode == SearchMode::automatic && cells <= 20);
    if (mode == SearchMode::exhaustive && cells > 24)
        throw std::invalid_argument(
            "brute_force_control: exhaustive search beyond 24 cells is rejected");

    auto evaluate = [&](const std::vector<double>& rates) {
        return problem.schedule_value(
            ThinningSchedule::piecewise(rates, horizon, problem.ceiling), horizon);
    };

    std::vector<double> best_rates(cells, 0.0);
    double best_value;
    if (exhaustive) {
        best_value = evaluate(best_rates);
        std::vector<double> rates(cells);
        const std::uint64_t limit = 1ull << cells;
        for (std::uint64_t mask = 1; mask < limit; ++mask) {
            for (std::size_t c = 0; c < cells; ++c)
                rates[c] = (mask >> c) & 1ull ? problem.ceiling : 0.0;
            double value = evaluate(rates);
            if (value > best_value) {
                best_value = value;
                best_rates = rates;
            }
        }
    } else {
        // deterministic coordinate ascent from fixed seeds
        std::vector<std::vector<double>> seeds;
        seeds.emplace_back(cells, 0.0);
        seeds.emplace_back(cells, problem.ceiling);
        for (std::uint64_t s = 0; s < 6; ++s) {
            double u = rng::uniform01(0x5eedu + s, 17);
            auto cut = static_cast<std::size_t>(u * static_cast<double>(cells));
            std::vector<double> seed(cells, 0.0);
            for (std::size_t c = cut; c < cells; ++c) seed[c] = problem.ceiling;
            seeds.push_back(std::move(seed));
        }
        bool first = true;
        best_value = 0.0;
        for (auto& seed : seeds) {
            auto rates = seed;
            double value = evaluate(rates);
            for (int pass = 0; pass < 200; ++pass) {
                bool improved = false;
                for (std::size_t c = 0; c < cells; ++c) {
                    double old = rates[c];
                    rates[c] = old == 0.0 ? problem.ceiling : 0.0;
                    double trial = evaluate(rates);
                    if (trial > value) {
                        value = trial;
                        improved = true;
                    } else {
                        rates[c] = old;
                    }
                }
                if (!improved) break;
            }
            if (first || value > best_value) {
                best_value = value;
                best_rates = rates;
                first = false;
            }
        }
    }
    return {ThinningSchedule::piecewise(best_rates, horizon, problem.ceiling), best_value};
}

Solution outer_max(const Problem& problem) {
    problem.validate();
    Solution sol;
    bool first = true;
    for (double T = problem.T_min; T <= problem.T_max + 1e-9; T += problem.T_step) {
        double horizon = snap(T, problem.dt);
        InnerSolution inner = inner_max(horizon, problem);
        double w0 = problem.land_value(inner.value, horizon);
        sol.value_curve.emplace_back(horizon, w0);
        if (first || w0 > sol.land_value) {  // strict: ties keep the smaller horizon
            sol.horizon = horizon;
            sol.schedule = inner.schedule;
            sol.inner_value = inner.value;
            sol.land_value = w0;
            first = false;
        }
    }
    auto traj = problem.run(sol.schedule, sol.horizon);
    auto adj = adjoint_backward(traj, problem.price, problem.econ, problem.risk, problem.model);
    sol.pontryagin = verify_bang_bang(adj, sol.schedule);
    return sol;
}

RefineResult refine_schedule(const Problem& problem, double horizon,
                             const ThinningSchedule& start, const RefineOptions& options) {
    const double hbar = problem.ceiling;

    auto refine_at = [&](double dt, std::vector<double> rates, std::size_t iters,
                         std::vector<double>* out_l) {
        const auto cells = rates.size();
        Problem pb = problem;
        pb.dt = dt;
        std::vector<double> step(cells, options.initial_step);
        std::vector<double> prev_grad(cells, 0.0);
        std::size_t done = 0;
        for (std::size_t it = 0; it < iters; ++it, ++done) {
            auto schedule = ThinningSchedule::piecewise(rates, horizon, hbar);
            auto traj = pb.run(schedule, horizon);
            auto adj = adjoint_backward(traj, pb.price, pb.econ, pb.risk, pb.model);
            double worst = 0.0;
            for (std::size_t c = 0; c < cells; ++c) {
                const double l = adj.indicator[c];
                bool off = rates[c] <= 0.0;
                bool full = rates[c] >= hbar;
                if ((off && l > options.band) || (full && l < -options.band) ||
                    (!off && !full && std::abs(l) > options.band))
                    worst = std::max(worst, std::abs(l));
            }
            if (worst <= 0.0 && it > 0) break;
            for (std::size_t c = 0; c < cells; ++c) {
                double g = adj.indicator[c] * traj[c].n;
                double same = g * prev_grad[c];
                if (same > 0.0)
                    step[c] = std::min(step[c] * 1.2, 0.02);
                else if (same < 0.0)
                    step[c] = std::max(step[c] * 0.5, 1e-15);
                prev_grad[c] = g;
                double dir = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
                rates[c] = std::clamp(rates[c] + step[c] * dir, 0.0, hbar);
            }
            if (out_l && it + 1 == iters) *out_l = adj.indicator;
        }
        return std::make_pair(rates, done);
    };

    // rate vector at a given cell width from an arbitrary schedule
    auto sample_rates = [&](const ThinningSchedule& sched, double dt) {
        auto cells = static_cast<std::size_t>(std::llround(horizon / dt));
        std::vector<double> rates(cells);
        for (std::size_t c = 0; c < cells; ++c)
            rates[c] = std::clamp(sched.rate_at((static_cast<double>(c) + 0.5) * dt), 0.0, hbar);
        return rates;
    };

    std::vector<double> levels;
    if (options.multigrid) {
        for (double dt : {0.4, 0.2, 0.1}) {
            double cells = horizon / dt;
            if (std::abs(cells - std::round(cells)) < 1e-9 && dt > problem.dt * (1.0 + 1e-12))
                levels.push_back(dt);
        }
    }
    levels.push_back(problem.dt);

    std::size_t total_iters = 0;
    ThinningSchedule current = start;
    std::vector<double> rates;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        double dt = levels[li];
        rates = sample_rates(current, dt);
        std::size_t iters = li + 1 == levels.size() ? options.max_iterations
                                                    : options.max_iterations / 2;
        auto [refined, used] = refine_at(dt, std::move(rates), iters, nullptr);
        total_iters += used;
        current = ThinningSchedule::piecewise(refined, horizon, hbar);
    }

    RefineResult result;
    result.schedule = current;
    result.iterations = total_iters;
    auto traj = problem.run(current, horizon);
    result.value = problem.schedule_value(traj);
    auto adj = adjoint_backward(traj, problem.price, problem.econ, problem.risk, problem.model);
    double worst = 0.0;
    const auto cells = static_cast<std::size_t>(std::llround(horizon / problem.dt));
    for (std::size_t c = 0; c < cells; ++c) {
        const double l = adj.indicator[c];
        const double r = current.rate_at((static_cast<double>(c) + 0.5) * problem.dt);
        bool off = r <= 0.0;
        bool full = r >= hbar;
        if ((off && l > options.band) || (full && l < -options.band) ||
            (!off && !full && std::abs(l) > options.band))
            worst = std::max(worst, std::abs(l));
    }
    result.max_indicator_violation = worst;
    result.converged = worst <= options.band;
    return result;
}

}  // namespace forest
