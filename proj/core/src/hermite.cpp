#include "barostab/hermite.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace barostab {

CubicHermite::CubicHermite(std::vector<double> x, std::vector<double> y,
                           std::vector<double> dy)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
  assert(x_.size() >= 2 && x_.size() == y_.size() && x_.size() == dy_.size());
}

std::size_t CubicHermite::segment(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicHermite::operator()(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double t = std::clamp((x - x_[i]) / h, 0.0, 1.0);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * dy_[i] + h01 * y_[i + 1] + h11 * h * dy_[i + 1];
}

double CubicHermite::derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double t = std::clamp((x - x_[i]) / h, 0.0, 1.0);
  const double t2 = t * t;
  const double dh00 = (6 * t2 - 6 * t) / h;
  const double dh10 = 3 * t2 - 4 * t + 1;
  const double dh01 = (-6 * t2 + 6 * t) / h;
  const double dh11 = 3 * t2 - 2 * t;
  return dh00 * y_[i] + dh10 * dy_[i] + dh01 * y_[i + 1] + dh11 * dy_[i + 1];
}

std::vector<double> estimate_derivatives(std::span<const double> x,
                                         std::span<const double> y) {
  const std::size_t n = x.size();
  assert(n >= 3 && y.size() == n);
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1];
    const double hr = x[i + 1] - x[i];
    // second-order formula on a nonuniform 3-point stencil
    d[i] = (hl * hl * y[i + 1] - hr * hr * y[i - 1] + (hr * hr - hl * hl) * y[i]) /
           (hl * hr * (hl + hr));
  }
  {
    const double h0 = x[1] - x[0];
    const double h1 = x[2] - x[1];
    d[0] = -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
           h0 / (h1 * (h0 + h1)) * y[2];
    const double g1 = x[n - 2] - x[n - 3];
    const double g0 = x[n - 1] - x[n - 2];
    d[n - 1] = (2 * g0 + g1) / (g0 * (g0 + g1)) * y[n - 1] -
               (g0 + g1) / (g0 * g1) * y[n - 2] + g0 / (g1 * (g0 + g1)) * y[n - 3];
  }
  return d;
}

}  // namespace barostab
