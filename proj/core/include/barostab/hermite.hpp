#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace barostab {

/// Piecewise cubic Hermite interpolant through (x_i, y_i) with prescribed
/// node derivatives dy_i. C^1, exact for cubics on each segment. The x grid
/// must be strictly increasing; evaluation clamps to the table range.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dy);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_, y_, dy_;
};

/// Node derivatives for tabulated data, second order: three-point one-sided
/// stencils at the ends, centered (nonuniform-aware) in the interior.
std::vector<double> estimate_derivatives(std::span<const double> x,
                                         std::span<const double> y);

}  // namespace barostab
