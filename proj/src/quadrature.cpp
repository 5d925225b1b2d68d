#include "forest/quadrature.hpp"

#include <stdexcept>

namespace forest {

double simpson(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("simpson: need an odd sample count (even interval count)");
    double odd = 0.0, even = 0.0;
    for (std::size_t k = 1; k + 1 < n; k += 2) odd += f[k];
    for (std::size_t k = 2; k + 1 < n; k += 2) even += f[k];
    return dx / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even);
}

double integrate_uniform(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * dx * (f[0] + f[1]);
    if (n % 2 == 1) return simpson(f, dx);
    // even sample count: Simpson on all but the last cell, then the
    // quadratic through the last three samples over the final cell
    double head = (n == 2) ? 0.0 : simpson(f.first(n - 1), dx);
    double tail = dx / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    return head + tail;
}

std::vector<double> cumulative_integral(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * dx * (f[0] + f[1]);
        return out;
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double cell;
        if (k % 2 == 0 && k + 2 < n) {
            // forward stencil (k, k+1, k+2)
            cell = dx / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
        } else {
            // backward stencil (k-1, k, k+1)
            cell = dx / 12.0 * (-f[k - 1] + 8.0 * f[k] + 5.0 * f[k + 1]);
        }
        out[k + 1] = out[k] + cell;
    }
    return out;
}

}  // namespace forest
