#pragma once

#include <span>
#include <vector>

namespace forest {

// Composite Simpson rule on a uniform grid. Requires an even number of
// intervals (odd sample count); throws std::invalid_argument otherwise.
double simpson(std::span<const double> values, double dx);

// Integral of uniformly sampled values using Simpson pairs; an odd interval
// count is handled with a three-point quadratic stencil on the last cell so
// the rule stays locally O(dx^4). Two samples fall back to the trapezoid.
double integrate_uniform(std::span<const double> values, double dx);

// Running integral F_k = int_0^{t_k} f. Each cell is integrated with the
// quadratic through three neighbouring samples; summed over a pair of cells
// this reproduces composite Simpson exactly.
std::vector<double> cumulative_integral(std::span<const double> values, double dx);

}  // namespace forest
