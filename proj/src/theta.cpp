#include "wfc/theta.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wfc {

ThetaGrid::ThetaGrid(double theta_min, double theta_max, std::size_t count) {
    if (!(theta_min > 0.0) || !(theta_max > theta_min) || count < 2) {
        throw std::invalid_argument("ThetaGrid: need 0 < min < max and count >= 2");
    }
    values_.resize(count);
    const double lo = std::log(theta_min);
    const double step = (std::log(theta_max) - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) values_[i] = std::exp(lo + step * static_cast<double>(i));
    values_.front() = theta_min;
    values_.back() = theta_max;
}

ThetaOptimum maximize_over_theta(const ThetaGrid& grid, const std::function<double(double)>& objective) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    double best = kNegInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = objective(grid[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    if (best == kNegInf) return {kNegInf, 0.0, false};

    ThetaOptimum result{best, grid[best_i], true};
    double a = std::log(grid[best_i == 0 ? 0 : best_i - 1]);
    double b = std::log(grid[best_i + 1 == grid.size() ? best_i : best_i + 1]);
    if (b <= a) return result;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(std::exp(x1));
    double f2 = objective(std::exp(x2));
    // Relative width in theta: exp(b - a) - 1 < 1e-4.
    while (b - a > 1e-4) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(std::exp(x2));
        }
    }
    if (f1 > result.value) result = {f1, std::exp(x1), true};
    if (f2 > result.value) result = {f2, std::exp(x2), true};
    return result;
}

ThetaOptimum minimize_over_theta(const ThetaGrid& grid, const std::function<double(double)>& objective) {
    auto r = maximize_over_theta(grid, [&](double theta) { return -objective(theta); });
    r.value = -r.value;
    return r;
}

}  // namespace wfc
