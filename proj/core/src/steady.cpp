#include "barostab/steady.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace barostab {
namespace {

namespace ode = boost::numeric::odeint;

constexpr double kVelocityFloor = 1e-14;
constexpr std::size_t kMaxSteps = 20'000'000;

std::vector<double> uniform_nodes(double a, double b, std::size_t n_cells) {
  std::vector<double> g(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n_cells);
  }
  g.back() = b;
  return g;
}

// Adaptive march from t0 to t1 that lands exactly on every requested node
// (steps are clamped, never interpolated past the range).
template <class Stepper, class System, class State>
void march(Stepper& stepper, System sys, State& y, double t0, double t1,
           std::span<const double> nodes,
           const std::function<void(std::size_t, const State&)>& on_node) {
  const double span = t1 - t0;
  const double snap = 1e-12 * span;
  double t = t0;
  double dt = span * 1e-6;
  std::size_t k = 0;
  while (k < nodes.size() && nodes[k] <= t0 + snap) on_node(k++, y);

  std::size_t steps = 0;
  while (t < t1 - snap) {
    const double t_stop = (k < nodes.size()) ? std::min(nodes[k], t1) : t1;
    double trial = std::min(dt, t_stop - t);
    const auto result = stepper.try_step(sys, y, t, trial);
    if (result == ode::controlled_step_result::success) {
      dt = std::max(trial, snap);
      if (t >= t_stop - snap) {
        t = t_stop;
        while (k < nodes.size() && nodes[k] <= t + snap) on_node(k++, y);
      }
    } else {
      dt = trial;
    }
    if (++steps > kMaxSteps) {
      fail(ErrorCode::StepFailure, "adaptive integrator exhausted its step budget");
    }
  }
  while (k < nodes.size()) on_node(k++, y);
}

double density_cap(const Eos& eos) {
  return std::isfinite(eos.rho_bar()) ? eos.rho_bar() * (1.0 - 1e-12)
                                      : std::numeric_limits<double>::infinity();
}

// nu du/dr = p(m/u) + m u + Lambda
struct StripRhs {
  const EosSpec* spec;
  double m, Lambda, nu, rho_cap;

  void operator()(const std::array<double, 1>& y, std::array<double, 1>& dydr,
                  double /*r*/) const {
    const double u = y[0];
    if (!(u > kVelocityFloor)) {
      fail(ErrorCode::BlowDown, "strip velocity reached the positivity floor");
    }
    const double rho = std::min(m / u, rho_cap);
    dydr[0] = (detail::pressure_raw(*spec, rho) + m * u + Lambda) / nu;
  }
};

struct StripRun {
  std::vector<double> u, du;
  double terminal;
};

StripRun run_strip(const Eos& eos, const BoundaryData& b, double Lambda,
                   std::span<const double> nodes) {
  StripRhs rhs{&eos.spec(), b.rho_B * b.u_B_minus, Lambda, b.nu(), density_cap(eos)};
  auto stepper = ode::make_controlled(1e-12, 1e-10, ode::runge_kutta_dopri5<std::array<double, 1>>());
  std::array<double, 1> y{b.u_B_minus};
  StripRun out;
  out.u.resize(nodes.size());
  out.du.resize(nodes.size());
  march(stepper, rhs, y, 0.0, 1.0, nodes,
        std::function<void(std::size_t, const std::array<double, 1>&)>(
            [&](std::size_t k, const std::array<double, 1>& s) {
              out.u[k] = s[0];
              std::array<double, 1> d;
              rhs(s, d, nodes[k]);
              out.du[k] = d[0];
            }));
  out.terminal = y[0];
  return out;
}

// Safeguarded secant inside a sign-changing bracket; falls back to bisection
// whenever the secant update leaves the bracket or stalls.
double bracketed_secant(const std::function<double(double)>& f, double a, double fa,
                        double b, double fb, double f_tol, int max_iter) {
  if (std::abs(fa) <= f_tol) return a;
  if (std::abs(fb) <= f_tol) return b;
  for (int i = 0; i < max_iter; ++i) {
    double c;
    if (fb != fa) {
      c = b - fb * (b - a) / (fb - fa);
    } else {
      c = 0.5 * (a + b);
    }
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (!(c > lo && c < hi)) c = 0.5 * (a + b);
    const double fc = f(c);
    if (std::isnan(fc)) {
      fail(ErrorCode::StepFailure, "shooting integration failed inside the bracket");
    }
    if (std::abs(fc) <= f_tol) return c;
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
    } else {
      a = b;
      fa = fb;
      b = c;
      fb = fc;
    }
    if (std::abs(b - a) <= 8.0 * std::numeric_limits<double>::epsilon() *
                               (std::abs(a) + std::abs(b) + 1.0)) {
      return (std::abs(fb) < std::abs(fa)) ? b : a;
    }
  }
  fail(ErrorCode::ToleranceFailure, "secant iteration did not reach tolerance");
}

struct AnnulusRhs {
  const EosSpec* spec;
  double m_tilde, nu, rho_cap;

  void operator()(const std::array<double, 2>& y, std::array<double, 2>& d,
                  double r) const {
    const double u = y[0];
    const double du = y[1];
    if (!(u > kVelocityFloor)) {
      fail(ErrorCode::BlowDown, "annulus velocity reached the positivity floor");
    }
    double rho = m_tilde / (r * r * u);
    if (!(rho > 0.0)) fail(ErrorCode::StepFailure, "annulus density left (0, rho_bar)");
    rho = std::min(rho, rho_cap);
    const double dp = detail::dpressure_raw(*spec, rho);
    const double drho = -rho * (2.0 / r + du / u);
    d[0] = du;
    d[1] = (dp * drho + (m_tilde / (r * r)) * du) / nu - 2.0 * (du / r - u / (r * r));
  }
};

struct AnnulusRun {
  std::vector<double> u, du;
  double terminal;
};

AnnulusRun run_annulus(const Eos& eos, const BoundaryData& b, const Geometry& g,
                       double slope0, std::span<const double> nodes) {
  AnnulusRhs rhs{&eos.spec(), g.r_minus * g.r_minus * b.u_B_minus * b.rho_B, b.nu(),
                 density_cap(eos)};
  auto stepper = ode::make_controlled(1e-12, 1e-10, ode::runge_kutta_dopri5<std::array<double, 2>>());
  std::array<double, 2> y{b.u_B_minus, slope0};
  AnnulusRun out;
  out.u.resize(nodes.size());
  out.du.resize(nodes.size());
  march(stepper, rhs, y, g.r_minus, g.r_plus, nodes,
        std::function<void(std::size_t, const std::array<double, 2>&)>(
            [&](std::size_t k, const std::array<double, 2>& s) {
              out.u[k] = s[0];
              out.du[k] = s[1];
            }));
  out.terminal = y[0];
  return out;
}

// Exterior momentum ODE expressed in the deviation from the far-field flow:
//   u1 = u + A/r^2,  carried as z = (r^6 u1, r^6 u1')
// so that the tiny far-field corrections stay under relative error control
// and div u = u1' + 2 u1/r never suffers cancellation.
struct ExteriorSystem {
  const EosSpec* spec;
  double r_t, A, rho_t, rho_inf, m_tilde, nu, rho_cap;

  void operator()(const std::array<double, 2>& z, std::array<double, 2>& d, double s) const {
    const double r = r_t - s;
    const double r2 = r * r;
    const double r3 = r2 * r;
    const double r6 = r3 * r3;
    const double u1 = z[0] / r6;
    const double du1 = z[1] / r6;
    const double ut = u1 - A / r2;
    if (!(ut < -kVelocityFloor)) {
      fail(ErrorCode::StepFailure, "exterior velocity left the outflow branch");
    }
    const double dut = du1 + 2.0 * A / r3;
    const double divu = du1 + 2.0 * u1 / r;
    double rho = A * rho_t / (A - r2 * u1);
    if (!(rho > 0.0)) fail(ErrorCode::StepFailure, "exterior density left (0, rho_bar)");
    rho = std::min(rho, rho_cap);
    const double drho = -rho * divu / ut;
    const double d2u1 = (detail::dpressure_raw(*spec, rho) * drho + (m_tilde / r2) * dut) / nu -
                        2.0 * (du1 / r - u1 / r2);
    d[0] = -(z[1] + 6.0 * z[0] / r);
    d[1] = -(r6 * d2u1 + 6.0 * z[1] / r);
  }
};

// Adaptive stiff one-step method for 2-state systems: semi-implicit Euler
// with Richardson extrapolation (order 2, L-stable base step) and
// step-doubling error control. The Jacobian is a frozen finite-difference
// approximation per step (W-method), which the inward acoustic relaxation
// mode of the exterior problem tolerates well. Absolute tolerances are
// per-component: the stiff variable rides a stable quasi-equilibrium whose
// tracking adjustments are self-correcting, so it runs under a looser floor
// than the slowly accumulating one.
class StiffStepper2 {
 public:
  StiffStepper2(std::array<double, 2> abs_tol, double rel_tol, double scale)
      : abs_tol_(abs_tol), rel_tol_(rel_tol), scale_(scale) {}

  template <class System>
  ode::controlled_step_result try_step(const System& sys, std::array<double, 2>& y, double& t,
                                       double& dt) {
    std::array<double, 2> f0;
    sys(y, f0, t);

    // frozen FD Jacobian at (y, t)
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
      std::array<double, 2> yp = y, fp;
      const double hj = 1e-7 * (std::abs(y[j]) + scale_);
      yp[j] += hj;
      sys(yp, fp, t);
      J[0][j] = (fp[0] - f0[0]) / hj;
      J[1][j] = (fp[1] - f0[1]) / hj;
    }

    const auto semi_step = [&](const std::array<double, 2>& yin,
                               const std::array<double, 2>& fin, double h,
                               std::array<double, 2>& yout) -> bool {
      // (I - h J) dy = h f
      const double a = 1.0 - h * J[0][0];
      const double b = -h * J[0][1];
      const double c = -h * J[1][0];
      const double d = 1.0 - h * J[1][1];
      const double det = a * d - b * c;
      if (det == 0.0 || !std::isfinite(det)) return false;
      const double r0 = h * fin[0];
      const double r1 = h * fin[1];
      yout[0] = yin[0] + (d * r0 - b * r1) / det;
      yout[1] = yin[1] + (-c * r0 + a * r1) / det;
      return true;
    };

    std::array<double, 2> y_big, y_half, f_half, y_two;
    bool ok = semi_step(y, f0, dt, y_big) && semi_step(y, f0, 0.5 * dt, y_half);
    if (ok) {
      try {
        sys(y_half, f_half, t + 0.5 * dt);
      } catch (const Error&) {
        ok = false;
      }
    }
    ok = ok && semi_step(y_half, f_half, 0.5 * dt, y_two);
    if (!ok) {
      dt *= 0.25;
      return ode::controlled_step_result::fail;
    }

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double diff = y_two[i] - y_big[i];
      const double sc = abs_tol_[i] + rel_tol_ * std::max(std::abs(y[i]), std::abs(y_two[i]));
      err = std::max(err, std::abs(diff) / sc);
    }
    // the estimate controls the order-1 base step (err ~ h^2)
    if (err <= 1.0) {
      t += dt;
      for (int i = 0; i < 2; ++i) y[i] = 2.0 * y_two[i] - y_big[i];
      const double grow = 0.9 * std::pow(std::max(err, 1e-12), -0.5);
      dt *= std::clamp(grow, 0.5, 5.0);
      return ode::controlled_step_result::success;
    }
    dt *= std::clamp(0.9 * std::pow(err, -0.5), 0.1, 0.7);
    return ode::controlled_step_result::fail;
  }

 private:
  std::array<double, 2> abs_tol_;
  double rel_tol_, scale_;
};

struct ExteriorRun {
  std::vector<double> u1, du1;
  double u1_at_rbar;
};

ExteriorRun run_exterior(const Eos& eos, const BoundaryData& b, double r_bar, double r_t,
                         double A, std::span<const double> nodes_r) {
  const double dp_inf = detail::dpressure_raw(eos.spec(), b.rho_inf);
  const double deficit_t = b.rho_inf * A * A / (2.0 * dp_inf * std::pow(r_t, 4));
  const double rho_t = b.rho_inf - deficit_t;
  ExteriorSystem sys{&eos.spec(), r_t, A, rho_t, b.rho_inf, -A * rho_t, b.nu(),
                     density_cap(eos)};
  const double z_scale = std::max(A * A * A * b.rho_inf / (2.0 * dp_inf), 1e-30);

  // nodes are given in r (increasing); the march runs in s = r_t - r
  std::vector<double> nodes_s(nodes_r.size());
  for (std::size_t i = 0; i < nodes_r.size(); ++i) {
    nodes_s[i] = r_t - nodes_r[nodes_r.size() - 1 - i];
  }

  StiffStepper2 stepper({1e-12 * z_scale, 1e-4 * z_scale}, 1e-10, z_scale);

  // start on the quasi-equilibrium slope (d/ds of r^6 u1' vanishing at the
  // truncation radius), which avoids an artificial acoustic relaxation layer
  const double m_tilde = -A * rho_t;
  const double dp_t = detail::dpressure_raw(eos.spec(), rho_t);
  const double denom =
      dp_t * rho_t * r_t * r_t / (A * b.nu()) + m_tilde / (r_t * r_t * b.nu()) + 4.0 / r_t;
  const double du1_init = -(2.0 * A * m_tilde / std::pow(r_t, 5)) / b.nu() / denom;
  std::array<double, 2> z{0.0, std::pow(r_t, 6) * du1_init};

  ExteriorRun out;
  out.u1.resize(nodes_r.size());
  out.du1.resize(nodes_r.size());
  march(stepper, sys, z, 0.0, r_t - r_bar, nodes_s,
        std::function<void(std::size_t, const std::array<double, 2>&)>(
            [&](std::size_t k, const std::array<double, 2>& state) {
              const std::size_t i = nodes_r.size() - 1 - k;
              const double r = nodes_r[i];
              const double r6 = std::pow(r, 6);
              out.u1[i] = state[0] / r6;
              out.du1[i] = state[1] / r6;
            }));
  const double r6_bar = std::pow(r_bar, 6);
  out.u1_at_rbar = z[0] / r6_bar;
  return out;
}

void attach_residuals(SteadyProfile& p, const Eos& eos) {
  const SteadyResiduals res = steady_residual(p, eos);
  p.residual_continuity = res.continuity;
  p.residual_momentum = res.momentum;
}

}  // namespace

StripVelocity integrate_strip_velocity(const Eos& eos, const BoundaryData& bdata,
                                       double Lambda, std::size_t n_cells) {
  bdata.validate(GeometryKind::Strip, eos.rho_bar());
  StripVelocity out;
  out.grid = uniform_nodes(0.0, 1.0, n_cells);
  StripRun run = run_strip(eos, bdata, Lambda, out.grid);
  out.u = std::move(run.u);
  out.terminal = run.terminal;
  return out;
}

SteadyProfile solve_strip_steady(const Eos& eos, const BoundaryData& b,
                                 const SolverOptions& opts) {
  b.validate(GeometryKind::Strip, eos.rho_bar());
  if (b.u_B_plus < b.u_B_minus) {
    fail(ErrorCode::ConfigError,
         "strip steady states are constructed only for u_B_plus >= u_B_minus");
  }
  const double m = b.rho_B * b.u_B_minus;
  const double Lambda_const =
      -detail::pressure_raw(eos.spec(), b.rho_B) - b.rho_B * b.u_B_minus * b.u_B_minus;
  const double f_tol = opts.tol * b.u_B_plus;

  const auto terminal = [&](double Lambda) {
    return run_strip(eos, b, Lambda, {}).terminal;
  };

  double root = Lambda_const;
  const double f0 = terminal(Lambda_const) - b.u_B_plus;
  if (std::abs(f0) > f_tol) {
    // expand upward until the terminal value exceeds the target, then bisect
    // (certified by the strict monotonicity of the terminal value in Lambda)
    double lo = Lambda_const;
    double step = 0.25 * std::max(1.0, std::abs(Lambda_const));
    double hi = lo;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
      hi = lo + step;
      if (terminal(hi) - b.u_B_plus > 0.0) {
        bracketed = true;
        break;
      }
      lo = hi;
      step *= 2.0;
    }
    if (!bracketed) {
      fail(ErrorCode::BracketFailure, "no upper bracket for Lambda within 60 doublings");
    }
    bool converged = false;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double fm = terminal(mid) - b.u_B_plus;
      if (std::abs(fm) <= f_tol) {
        root = mid;
        converged = true;
        break;
      }
      (fm > 0.0 ? hi : lo) = mid;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(lo) + std::abs(hi) + 1.0)) {
        root = mid;
        converged = true;
        break;
      }
    }
    if (!converged) fail(ErrorCode::ToleranceFailure, "Lambda bisection stalled");
  }

  SteadyProfile p;
  p.geometry = Geometry::strip();
  p.boundary = b;
  p.grid = uniform_nodes(0.0, 1.0, opts.n_cells);
  StripRun run = run_strip(eos, b, root, p.grid);
  p.u_tilde = std::move(run.u);
  p.du_tilde = std::move(run.du);
  p.Lambda = root;
  p.mass_flux = m;
  const std::size_t n = p.grid.size();
  p.rho_tilde.resize(n);
  p.div_u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.rho_tilde[i] = m / p.u_tilde[i];
    p.div_u[i] = p.du_tilde[i];
  }
  attach_residuals(p, eos);
  return p;
}

SteadyProfile solve_annulus_steady(const Eos& eos, const BoundaryData& b,
                                   const Geometry& g, const SolverOptions& opts) {
  g.validate();
  if (g.kind != GeometryKind::Annulus) fail(ErrorCode::ConfigError, "annulus geometry expected");
  b.validate(g.kind, eos.rho_bar());

  const double f_tol = opts.tol * b.u_B_plus;
  std::vector<std::pair<double, double>> samples;  // (slope, terminal - target)
  const auto shoot = [&](double s0) -> double {
    try {
      const double f = run_annulus(eos, b, g, s0, {}).terminal - b.u_B_plus;
      samples.emplace_back(s0, f);
      return f;
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  // walk away from the chord slope until the terminal map changes sign
  const double chord = (b.u_B_plus - b.u_B_minus) / (g.r_plus - g.r_minus);
  const double scale = std::abs(chord) + b.u_B_minus / (g.r_plus - g.r_minus) + 1e-6;
  double sa = chord, fa = shoot(sa);
  double sb = sa, fb = fa;
  if (std::isnan(fa)) fail(ErrorCode::BracketFailure, "annulus shooting failed at the chord slope");
  if (std::abs(fa) > f_tol) {
    const double dir = (fa > 0.0) ? -1.0 : 1.0;
    double step = 0.25 * scale;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
      sb = sa + dir * step;
      fb = shoot(sb);
      if (!std::isnan(fb) && (fb > 0.0) != (fa > 0.0)) {
        bracketed = true;
        break;
      }
      if (!std::isnan(fb)) {
        sa = sb;
        fa = fb;
      }
      step *= 2.0;
    }
    if (!bracketed) {
      fail(ErrorCode::BracketFailure, "no bracket for the annulus shooting slope");
    }
  }

  double root = sa;
  if (std::abs(fa) > f_tol) {
    root = bracketed_secant([&](double s) { return shoot(s); }, sa, fa, sb, fb, f_tol, 100);
  }

  // the paper proves no monotonicity of the terminal map; record what we saw
  std::sort(samples.begin(), samples.end());
  bool nondecreasing = true, nonincreasing = true;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].second < samples[i - 1].second) nondecreasing = false;
    if (samples[i].second > samples[i - 1].second) nonincreasing = false;
  }

  SteadyProfile p;
  p.geometry = g;
  p.boundary = b;
  p.grid = uniform_nodes(g.r_minus, g.r_plus, opts.n_cells);
  AnnulusRun run = run_annulus(eos, b, g, root, p.grid);
  p.u_tilde = std::move(run.u);
  p.du_tilde = std::move(run.du);
  p.Lambda = root;
  p.mass_flux = g.r_minus * g.r_minus * b.rho_B * b.u_B_minus;
  p.nonmonotone_shooting = !(nondecreasing || nonincreasing);
  const std::size_t n = p.grid.size();
  p.rho_tilde.resize(n);
  p.div_u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p.grid[i];
    p.rho_tilde[i] = p.mass_flux / (r * r * p.u_tilde[i]);
    p.div_u[i] = p.du_tilde[i] + 2.0 * p.u_tilde[i] / r;
  }
  attach_residuals(p, eos);
  return p;
}

SteadyProfile solve_exterior_steady(const Eos& eos, const BoundaryData& b,
                                    const Geometry& g, const SolverOptions& opts) {
  g.validate();
  if (g.kind != GeometryKind::Exterior) fail(ErrorCode::ConfigError, "exterior geometry expected");
  b.validate(g.kind, eos.rho_bar());

  const double r_bar = g.r_bar;
  const double r_t = g.r_trunc;
  const double f_tol = opts.tol * b.u_B;

  const auto shoot = [&](double A, double trunc) {
    // u(r_bar) = u1(r_bar) - A/r_bar^2, target -u_B
    const double u1 = run_exterior(eos, b, r_bar, trunc, A, {}).u1_at_rbar;
    return u1 - A / (r_bar * r_bar) + b.u_B;
  };

  const auto solve_amplitude = [&](double trunc) {
    double A0 = b.u_B * r_bar * r_bar;
    double A1 = A0 * (1.0 + 1e-4);
    double g0 = shoot(A0, trunc);
    double g1 = shoot(A1, trunc);
    for (int i = 0; i < 60; ++i) {
      if (std::abs(g1) <= f_tol) return A1;
      if (g1 == g0) break;
      const double A2 = A1 - g1 * (A1 - A0) / (g1 - g0);
      A0 = A1;
      g0 = g1;
      A1 = A2;
      g1 = shoot(A1, trunc);
    }
    if (std::abs(g1) <= f_tol) return A1;
    fail(ErrorCode::BracketFailure, "exterior amplitude iteration did not converge");
  };

  const double A = solve_amplitude(r_t);

  SteadyProfile p;
  p.geometry = g;
  p.boundary = b;
  p.grid = uniform_nodes(r_bar, r_t, opts.n_cells);
  ExteriorRun run = run_exterior(eos, b, r_bar, r_t, A, p.grid);

  const double dp_inf = detail::dpressure_raw(eos.spec(), b.rho_inf);
  const double deficit_t = b.rho_inf * A * A / (2.0 * dp_inf * std::pow(r_t, 4));
  const double rho_t = b.rho_inf - deficit_t;
  const double m_tilde = -A * rho_t;

  const std::size_t n = p.grid.size();
  p.u_tilde.resize(n);
  p.du_tilde.resize(n);
  p.rho_tilde.resize(n);
  p.rho_deficit.resize(n);
  p.div_u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p.grid[i];
    const double u1 = run.u1[i];
    const double du1 = run.du1[i];
    p.u_tilde[i] = u1 - A / (r * r);
    p.du_tilde[i] = du1 + 2.0 * A / (r * r * r);
    p.div_u[i] = du1 + 2.0 * u1 / r;
    p.rho_deficit[i] = (A * deficit_t - b.rho_inf * r * r * u1) / (A - r * r * u1);
    p.rho_tilde[i] = b.rho_inf - p.rho_deficit[i];
  }
  p.Lambda = A;
  p.mass_flux = m_tilde;
  attach_residuals(p, eos);

  if (opts.check_truncation) {
    const double A2 = solve_amplitude(2.0 * r_t);
    ExteriorRun run2 = run_exterior(eos, b, r_bar, 2.0 * r_t, A2, p.grid);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = p.grid[i];
      const double u2 = run2.u1[i] - A2 / (r * r);
      max_diff = std::max(max_diff, std::abs(u2 - p.u_tilde[i]));
    }
    p.truncation_warning = max_diff > 100.0 * opts.tol * b.u_B;
  }
  return p;
}

void steady_residual_fields(const SteadyProfile& p, const Eos& eos,
                            std::vector<double>& continuity, std::vector<double>& momentum) {
  const std::size_t n = p.grid.size();
  if (n < 17) fail(ErrorCode::ConfigError, "steady_residual needs at least 16 cells");
  const double h = p.grid[1] - p.grid[0];
  const double nu = p.boundary.nu();
  const int alpha = p.geometry.alpha;
  const auto w = [&](std::size_t i) {
    return alpha == 0 ? 1.0 : p.grid[i] * p.grid[i];
  };

  continuity.assign(n, 0.0);
  momentum.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double flux_p = w(i + 1) * p.rho_tilde[i + 1] * p.u_tilde[i + 1];
    const double flux_m = w(i - 1) * p.rho_tilde[i - 1] * p.u_tilde[i - 1];
    continuity[i] = (flux_p - flux_m) / (2.0 * h) / w(i);

    const double du_c = (p.u_tilde[i + 1] - p.u_tilde[i - 1]) / (2.0 * h);
    const double dp_c = (detail::pressure_raw(eos.spec(), p.rho_tilde[i + 1]) -
                         detail::pressure_raw(eos.spec(), p.rho_tilde[i - 1])) /
                        (2.0 * h);
    const double d2u = (p.u_tilde[i + 1] - 2.0 * p.u_tilde[i] + p.u_tilde[i - 1]) / (h * h);
    double visc = d2u;
    if (alpha != 0) {
      const double uo_p = p.u_tilde[i + 1] / p.grid[i + 1];
      const double uo_m = p.u_tilde[i - 1] / p.grid[i - 1];
      visc += alpha * (uo_p - uo_m) / (2.0 * h);
    }
    momentum[i] = p.rho_tilde[i] * p.u_tilde[i] * du_c + dp_c - nu * visc;
  }
}

SteadyResiduals steady_residual(const SteadyProfile& p, const Eos& eos) {
  std::vector<double> rc, rm;
  steady_residual_fields(p, eos, rc, rm);
  SteadyResiduals out;
  for (std::size_t i = 0; i < rc.size(); ++i) {
    out.continuity = std::max(out.continuity, std::abs(rc[i]));
    out.momentum = std::max(out.momentum, std::abs(rm[i]));
  }
  return out;
}

namespace {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double n = static_cast<double>(cnt);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExteriorDecayFits fit_exterior_decay(const SteadyProfile& p) {
  if (p.geometry.kind != GeometryKind::Exterior) {
    fail(ErrorCode::ConfigError, "decay fits apply to exterior profiles");
  }
  const double r_hi = p.geometry.r_trunc;
  const double r_lo = r_hi / 10.0;
  std::vector<double> r, deficit, absu, du;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    if (p.grid[i] < r_lo || p.grid[i] > r_hi) continue;
    r.push_back(p.grid[i]);
    deficit.push_back(p.rho_deficit[i]);
    absu.push_back(std::abs(p.u_tilde[i]));
    du.push_back(p.du_tilde[i]);
  }
  ExteriorDecayFits fits;
  fits.slope_deficit = loglog_slope(r, deficit);
  fits.slope_u = loglog_slope(r, absu);
  fits.slope_du = loglog_slope(r, du);
  return fits;
}

ProfileOnCenters resample_to_centers(const SteadyProfile& p, double r_min, double h,
                                     std::size_t n_cells) {
  const std::size_t n = p.grid.size();
  std::vector<double> du_rho(n), du_div(n);

  // exact node derivatives: u' is stored, rho' follows from continuity
  std::vector<double> drho(n);
  for (std::size_t i = 0; i < n; ++i) {
    drho[i] = -p.rho_tilde[i] * p.div_u[i] / p.u_tilde[i];
  }
  CubicHermite u_interp(p.grid, p.u_tilde, p.du_tilde);
  CubicHermite du_interp(p.grid, p.du_tilde, estimate_derivatives(p.grid, p.du_tilde));
  CubicHermite div_interp(p.grid, p.div_u, estimate_derivatives(p.grid, p.div_u));

  const bool exterior = p.geometry.kind == GeometryKind::Exterior;
  CubicHermite rho_interp, deficit_interp;
  if (exterior) {
    std::vector<double> ddef(n);
    for (std::size_t i = 0; i < n; ++i) ddef[i] = -drho[i];
    deficit_interp = CubicHermite(p.grid, p.rho_deficit, std::move(ddef));
  } else {
    rho_interp = CubicHermite(p.grid, p.rho_tilde, std::move(drho));
  }

  ProfileOnCenters out;
  out.r.resize(n_cells);
  out.rho.resize(n_cells);
  out.u.resize(n_cells);
  out.du.resize(n_cells);
  out.div.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    const double r = r_min + (static_cast<double>(i) + 0.5) * h;
    out.r[i] = r;
    out.u[i] = u_interp(r);
    out.du[i] = du_interp(r);
    out.div[i] = div_interp(r);
    out.rho[i] = exterior ? p.boundary.rho_inf - deficit_interp(r) : rho_interp(r);
  }
  out.rho_face_in = p.rho_tilde.front();
  out.rho_face_out = p.rho_tilde.back();
  return out;
}

std::vector<FlatCurvedRow> flat_curved_comparison(const Eos& eos, const BoundaryData& b,
                                                  std::span<const double> r_list,
                                                  const SolverOptions& opts) {
  std::vector<FlatCurvedRow> table;
  table.reserve(r_list.size());
  const SteadyProfile flat = solve_strip_steady(eos, b, opts);  // r-independent
  for (double r : r_list) {
    if (!(r >= 2.0)) fail(ErrorCode::ConfigError, "flat/curved comparison needs r >= 2");
    SteadyProfile curved = solve_annulus_steady(eos, b, Geometry::annulus(r, r + 1.0), opts);
    FlatCurvedRow row;
    row.r = r;
    for (std::size_t i = 0; i < flat.grid.size(); ++i) {
      row.dist_u = std::max(row.dist_u, std::abs(curved.u_tilde[i] - flat.u_tilde[i]));
      row.dist_du = std::max(row.dist_du, std::abs(curved.du_tilde[i] - flat.du_tilde[i]));
      row.dist_rho = std::max(row.dist_rho, std::abs(curved.rho_tilde[i] - flat.rho_tilde[i]));
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace barostab
