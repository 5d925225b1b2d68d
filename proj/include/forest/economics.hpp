#pragma once

#include <functional>
#include <vector>

#include "forest/dynamics.hpp"

namespace forest {

struct EconomicParams {
    double discount_rate = 0.0;           // delta, per month (> 0)
    double replanting_cost = 0.0;         // c1, euro/ha
    double fixed_clearing_cost = 0.0;     // c2, euro/ha
    double damaged_clearing_cost = 0.0;   // cd, euro per damaged stem
    double survivor_clearing_cost = 0.0;  // cs, euro per surviving stem

    void validate() const;  // throws std::invalid_argument
};

// Stem price p(s, t) in euro and its partial derivative in s.
struct PriceModel {
    std::function<double(double s, double t)> value;
    std::function<double(double s, double t)> slope;

    double dp_ds(double s, double t) const;  // analytic slope or central difference
};

PriceModel eucalyptus_price();
PriceModel constant_price(double price);

// Destructive-event intensity and salvage expectations. alpha(t) is the
// expected surviving fraction of the stand value, alpha_p(t) additionally
// discounts for post-event price depreciation; 0 <= alpha_p <= alpha <= 1.
class RiskParams {
  public:
    static RiskParams none();
    static RiskParams constant(double lambda, double alpha, double alpha_p);
    static RiskParams with_profiles(double lambda, std::function<double(double)> alpha,
                                    std::function<double(double)> alpha_p);

    double lambda() const { return lambda_; }
    double alpha(double t) const;
    double alpha_p(double t) const;
    // c_n(t) = cd (1 - alpha(t)) + cs alpha(t)
    double clearing_coefficient(double t, const EconomicParams& econ) const;

  private:
    RiskParams(double lambda, std::function<double(double)> alpha,
               std::function<double(double)> alpha_p);
    double lambda_ = 0.0;
    std::function<double(double)> alpha_;
    std::function<double(double)> alpha_p_;
};

double tree_weight(double s, double t);  // kg, Eucalyptus preset
double tree_price(double s, double t);   // euro/stem, Eucalyptus preset

// Thinning income on [0, t] compounded forward to t:
//   H(t) = int_0^t p(s(u), u) h(u) n(u) e^{rate (t-u)} du.
// t must lie on the trajectory grid.
double thinning_income(const Trajectory& traj, const PriceModel& price,
                       double discount_rate, double t);

// Clear-cut income p(s, t) * n.
double final_income(double n, double s, double t, const PriceModel& price);

// Thinning income plus final income at the horizon.
double total_income(const Trajectory& traj, const PriceModel& price,
                    double discount_rate, double horizon);

// Faustmann land value without risk: (V - c1) / (e^{delta T} - 1).
double land_value_norisk(double total_income, double replanting_cost,
                         double discount_rate, double horizon);

struct ClearingCost {
    double expected_total;        // c2 + c_n(t) n
    double per_tree_coefficient;  // c_n(t)
};
ClearingCost expected_clearing_cost(double n, double t, const RiskParams& risk,
                                    const EconomicParams& econ);

// Risk-adjusted income
//   int_0^T [p h n + lambda alpha_p V0(n,s) - lambda c_n n] e^{(delta+lambda)(T-t)} dt
//   + V0(n(T), s(T)),
// which collapses to total_income when lambda = 0.
double modified_income(const Trajectory& traj, const PriceModel& price,
                       const EconomicParams& econ, const RiskParams& risk,
                       double horizon);

// Land value under event risk from the risk-adjusted income:
//   (delta+lambda)/delta * (V1 - c1) / (e^{(delta+lambda)T} - 1)
//   - lambda/delta * (c1 + c2).
double land_value_risk(double modified_income, const EconomicParams& econ,
                       const RiskParams& risk, double horizon);

// Running present value of the thinning income stream,
//   C_k = int_0^{t_k} p(s,u) h(u) n(u) e^{-rate u} du,
// integrated piecewise between schedule breakpoints so the control
// discontinuity never smears across a quadrature stencil.
std::vector<double> discounted_thinning_cumulative(const Trajectory& traj,
                                                   const PriceModel& price,
                                                   double rate);

}  // namespace forest
