#include "barostab/quadrature.hpp"

#include <cmath>

#include "barostab/errors.hpp"

namespace barostab {
namespace {

// Gauss-Kronrod 7-15 pair on [-1, 1]. Abscissae are symmetric; only the
// non-negative half is tabulated.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double result_gauss = fc * kWg[3];
  double result_kronrod = fc * kWgk[7];

  for (int j = 0; j < 7; ++j) {
    const double x = half * kXgk[j];
    const double f1 = f(center - x);
    const double f2 = f(center + x);
    result_kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
  }

  return {result_kronrod * half, std::abs((result_kronrod - result_gauss) * half)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
             double rel_tol, int depth, int max_depth) {
  const GkResult r = gk15(f, a, b);
  if (!std::isfinite(r.value)) {
    fail(ErrorCode::QuadratureFailure, "non-finite integrand");
  }
  if (r.error <= std::max(abs_tol, rel_tol * std::abs(r.value))) return r.value;
  if (depth >= max_depth) {
    fail(ErrorCode::QuadratureFailure, "refinement depth exhausted");
  }
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * abs_tol, rel_tol, depth + 1, max_depth) +
         adapt(f, mid, b, 0.5 * abs_tol, rel_tol, depth + 1, max_depth);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double sign = (b > a) ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return sign * adapt(f, lo, hi, abs_tol, rel_tol, 0, max_depth);
}

}  // namespace barostab
