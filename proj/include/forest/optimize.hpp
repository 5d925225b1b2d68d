#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "forest/control.hpp"
#include "forest/dynamics.hpp"
#include "forest/economics.hpp"

namespace forest {

// Raised when an optimization or estimation step produces an internally
// inconsistent or non-contractive result.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ControlFamily {
    none,       // h = 0 only
    bang_bang,  // single switch 0 -> h_bar
    free_grid,  // h in {0, h_bar} per uniform cell
};

// A full problem instance: stand model, prices, costs, risk, initial state,
// and the horizon search range of the outer Faustmann maximization.
struct Problem {
    GrowthModel model;
    PriceModel price;
    EconomicParams econ;
    RiskParams risk = RiskParams::none();
    double initial_density = 0.0;     // n0, stems/ha
    double initial_basal_area = 0.0;  // s0, m^2
    double ceiling = 0.075;           // h_bar, per month
    double T_min = 0.0;
    double T_max = 0.0;
    double T_step = 0.5;
    double dt = 0.05;
    ControlFamily family = ControlFamily::bang_bang;

    void validate() const;
    Trajectory run(const ThinningSchedule& schedule, double horizon) const;
    // Inner objective of a schedule: the risk-adjusted income (total income
    // when lambda = 0).
    double schedule_value(const Trajectory& traj) const;
    double schedule_value(const ThinningSchedule& schedule, double horizon) const;
    // Outer objective: land value of an inner value at the given horizon.
    double land_value(double inner_value, double horizon) const;
};

struct InnerSolution {
    ThinningSchedule schedule;
    double value = 0.0;  // inner income objective
};

// Best schedule of the problem's control family at a fixed cutting age.
// The bang-bang family scans switch times at 0.5-month resolution and then
// refines around the best at the integration step, preferring the later
// switch on ties so a worthless thinning window degenerates to none.
InnerSolution inner_max(double horizon, const Problem& problem);

enum class SearchMode { automatic, exhaustive, hill_climb };

// Free-grid search over h in {0, h_bar} per cell of width cell_months.
// Exhaustive enumeration up to 20 cells (24 when forced), deterministic
// multi-seed coordinate ascent beyond that.
InnerSolution brute_force_control(double horizon, const Problem& problem,
                                  double cell_months,
                                  SearchMode mode = SearchMode::automatic);

struct Solution {
    double horizon = 0.0;  // optimal cutting age
    ThinningSchedule schedule;
    double inner_value = 0.0;
    double land_value = 0.0;
    ConsistencyReport pontryagin;  // adjoint sign check of the winner
    std::vector<std::pair<double, double>> value_curve;  // (T, W0)
};

// Two-stage Faustmann solve: inner_max over schedules at each horizon on
// the T grid, then argmax of the land value over horizons (ties break
// toward the smaller horizon).
Solution outer_max(const Problem& problem);

struct RefineOptions {
    std::size_t max_iterations = 4000;
    double band = 1e-6;        // target max |l| over interior cells
    double initial_step = 1e-4;
    bool multigrid = true;     // converge on coarse grids first
};

struct RefineResult {
    ThinningSchedule schedule;
    double value = 0.0;
    double max_indicator_violation = 0.0;  // max |l| where sign consistency fails
    std::size_t iterations = 0;
    bool converged = false;
};

// Gradient ascent on the discretized control (rates free in [0, h_bar])
// using the adjoint indicator l(t) n(t) as the objective gradient. Where
// the optimum is interior this converges to the singular rate profile with
// l ~ 0, yielding a schedule that passes verify_bang_bang.
RefineResult refine_schedule(const Problem& problem, double horizon,
                             const ThinningSchedule& start,
                             const RefineOptions& options = {});

}  // namespace forest
