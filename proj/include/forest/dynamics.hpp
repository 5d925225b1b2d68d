#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace forest {

// State of the average-tree model: stems per hectare and mean tree basal
// area (m^2, measured at breast height). Time is in months.
struct StandState {
    double t = 0.0;
    double n = 0.0;
    double s = 0.0;
};

// Piecewise-constant thinning rate h(t) on [0, horizon], bounded by a
// common ceiling. Breakpoints are strictly increasing and start at 0.
class ThinningSchedule {
  public:
    ThinningSchedule(std::vector<double> breakpoints, std::vector<double> rates,
                     double ceiling);

    static ThinningSchedule none(double horizon, double ceiling);
    static ThinningSchedule constant_rate(double rate, double horizon, double ceiling);
    // rate 0 on [0, switch_time), ceiling on [switch_time, horizon]
    static ThinningSchedule bang_bang(double switch_time, double horizon, double ceiling);
    // one rate per uniform cell of width horizon / cell_rates.size()
    static ThinningSchedule piecewise(const std::vector<double>& cell_rates,
                                      double horizon, double ceiling);

    // Right-continuous lookup; t >= horizon returns the final interval rate.
    double rate_at(double t) const;
    double ceiling() const { return ceiling_; }
    double horizon() const { return breakpoints_.back(); }
    // First time the rate becomes positive (horizon if the schedule never thins).
    double first_thinning_time() const;
    // True when rates follow the pattern 0,...,0,ceiling,...,ceiling.
    bool is_bang_bang() const;
    bool is_zero() const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& rates() const { return rates_; }

  private:
    std::vector<double> breakpoints_;
    std::vector<double> rates_;
    double ceiling_;
};

// Individual growth G(n, s, t) together with natural mortality m(t).
// The partial derivatives are optional; presets supply analytic ones and
// central differences are used when they are absent.
struct GrowthModel {
    std::function<double(double n, double s, double t)> growth;
    std::function<double(double t)> mortality;
    bool density_dependent = false;
    std::function<double(double n, double s, double t)> growth_dn;
    std::function<double(double n, double s, double t)> growth_ds;

    double dG_dn(double n, double s, double t) const;
    double dG_ds(double n, double s, double t) const;
};

double eucalyptus_height(double t);       // meters
double eucalyptus_height_rate(double t);  // m/month
double eucalyptus_growth(double n, double s, double t);

GrowthModel eucalyptus_model(double mortality_rate = 0.0042);
// Growth independent of stand density: G(n, s, t) = growth(s, t).
GrowthModel density_free_model(std::function<double(double s, double t)> growth,
                               std::function<double(double t)> mortality);

// Fixed-step solution samples on a uniform grid, together with the schedule
// that produced them. Interior states interpolate with cubic Hermite using
// the stored interval slopes, so lookups match the integrator's accuracy.
class Trajectory {
  public:
    Trajectory(double dt, std::vector<StandState> samples, ThinningSchedule schedule,
               std::vector<double> slope_n_begin, std::vector<double> slope_n_end,
               std::vector<double> slope_s_begin, std::vector<double> slope_s_end);

    double dt() const { return dt_; }
    std::size_t size() const { return samples_.size(); }
    const StandState& operator[](std::size_t k) const { return samples_[k]; }
    const StandState& back() const { return samples_.back(); }
    double horizon() const { return samples_.back().t; }
    const ThinningSchedule& schedule() const { return schedule_; }

    StandState state_at(double t) const;
    double n_at(double t) const { return state_at(t).n; }
    double s_at(double t) const { return state_at(t).s; }

    // CSV with header "t,n,s", one row per grid sample.
    void write_csv(std::ostream& out) const;

  private:
    double dt_;
    std::vector<StandState> samples_;
    ThinningSchedule schedule_;
    std::vector<double> slope_n_begin_, slope_n_end_;
    std::vector<double> slope_s_begin_, slope_s_end_;
};

// Classical fixed-step RK4 for dn/dt = -(m+h)n, ds/dt = G(n,s,t).
// Steps never straddle a schedule breakpoint: breakpoints must sit on the
// integration grid and horizon must be a multiple of dt.
Trajectory simulate(const StandState& initial, const GrowthModel& model,
                    const ThinningSchedule& schedule, double horizon, double dt);

// Stand-aggregate form dS/dt = g0(S) * seasonal(t) - (m(t)+h(t)) S, used to
// check the reduction from the average-tree model. Returns (t, S) samples.
std::vector<std::pair<double, double>> simulate_stand_aggregate(
    double S0, const std::function<double(double)>& g0,
    const std::function<double(double)>& seasonal,
    const std::function<double(double)>& mortality,
    const ThinningSchedule& schedule, double horizon, double dt);

}  // namespace forest
