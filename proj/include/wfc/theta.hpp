#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wfc {

/// Logarithmically spaced theta values (per Mb) in [min, max].
class ThetaGrid {
public:
    ThetaGrid(double theta_min, double theta_max, std::size_t count);

    /// 64 points over [1e-4, 1e3] per Mb.
    static ThetaGrid standard() { return ThetaGrid(1e-4, 1e3, 64); }

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

struct ThetaOptimum {
    double value;   // best objective; -inf when no theta was feasible
    double theta;   // argmax (0 when infeasible)
    bool feasible;
};

/// Maximises objective(theta) over the grid, then refines by golden-section
/// search in log(theta) on the interval bracketing the best grid point until
/// its relative width is below 1e-4. The objective returns -inf where theta is
/// infeasible. The result is never worse than the best grid point.
ThetaOptimum maximize_over_theta(const ThetaGrid& grid, const std::function<double(double)>& objective);

/// Same, minimising; infeasible points return +inf.
ThetaOptimum minimize_over_theta(const ThetaGrid& grid, const std::function<double(double)>& objective);

}  // namespace wfc
