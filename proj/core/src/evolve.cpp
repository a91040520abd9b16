#include "barostab/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

#include "barostab/steady.hpp"

namespace barostab {
namespace {

inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

struct ClampBounds {
  double floor, cap;
};

ClampBounds clamp_bounds(const Eos& eos) {
  if (std::isfinite(eos.rho_bar())) {
    return {1e-12 * eos.rho_bar(), (1.0 - 1e-12) * eos.rho_bar()};
  }
  return {1e-12, std::numeric_limits<double>::infinity()};
}

// Inflow faces impose (rho_B, u); outflow faces impose the velocity and
// extrapolate density from the adjacent cell; the exterior far field is a
// Dirichlet (rho_inf, 0) ghost.
GhostStates physical_ghosts(GeometryKind kind, const BoundaryData& b, double rho_first,
                            double rho_last) {
  GhostStates g;
  if (kind == GeometryKind::Exterior) {
    g.rho_l = rho_first;
    g.u_l = -b.u_B;
    g.rho_r = b.rho_inf;
    g.u_r = 0.0;
  } else {
    g.rho_l = b.rho_B;
    g.u_l = b.u_B_minus;
    g.rho_r = rho_last;
    g.u_r = b.u_B_plus;
  }
  return g;
}

void refresh_weights(StepWorkspace& ws, const FluidState& s) {
  const std::size_t n = s.n_cells();
  const int alpha = s.geometry.alpha;
  if (ws.cached_r_min == s.r_min && ws.cached_h == s.h && ws.cached_alpha == alpha &&
      ws.w_center.size() == n) {
    return;
  }
  ws.w_center.resize(n);
  ws.w_face.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.center(i);
    ws.w_center[i] = (alpha == 0) ? 1.0 : r * r;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = s.face(i);
    ws.w_face[i] = (alpha == 0) ? 1.0 : r * r;
  }
  ws.cached_r_min = s.r_min;
  ws.cached_h = s.h;
  ws.cached_alpha = alpha;
}

// Spatial operator L(rho, m) -> (k_rho, k_m) for one stage at time t.
void stage_rhs(const FluidState& s, const Eos& eos, const BoundaryData& b,
               const std::vector<double>& rho, const std::vector<double>& m, double t,
               const StepOptions& opts, StepWorkspace& ws, std::vector<double>& k_rho,
               std::vector<double>& k_m) {
  const std::size_t n = rho.size();
  const double h = s.h;
  const double nu = b.nu();
  const EosSpec& spec = eos.spec();
  const int alpha = s.geometry.alpha;

  ws.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.u[i] = m[i] / rho[i];

  const GhostStates g = opts.hooks.ghosts
                            ? opts.hooks.ghosts(t)
                            : physical_ghosts(s.geometry.kind, b, rho.front(), rho.back());

  ws.flux_rho.resize(n + 1);
  ws.flux_m.resize(n + 1);
  ws.theta.resize(n + 1);

  // cell value accessors with one ghost layer
  const auto rho_at = [&](long i) -> double {
    if (i < 0) return g.rho_l;
    if (i >= static_cast<long>(n)) return g.rho_r;
    return rho[static_cast<std::size_t>(i)];
  };
  const auto u_at = [&](long i) -> double {
    if (i < 0) return g.u_l;
    if (i >= static_cast<long>(n)) return g.u_r;
    return ws.u[static_cast<std::size_t>(i)];
  };
  const auto slope = [&](long i, const auto& q) -> double {
    if (i < 0 || i >= static_cast<long>(n)) return 0.0;  // ghost cells are flat
    return minmod(q(i) - q(i - 1), q(i + 1) - q(i));
  };

  for (std::size_t f = 0; f <= n; ++f) {
    const long iL = static_cast<long>(f) - 1;
    const long iR = static_cast<long>(f);
    double rho_L = rho_at(iL), u_L = u_at(iL);
    double rho_R = rho_at(iR), u_R = u_at(iR);
    if (opts.second_order) {
      rho_L += 0.5 * slope(iL, rho_at);
      u_L += 0.5 * slope(iL, u_at);
      rho_R -= 0.5 * slope(iR, rho_at);
      u_R -= 0.5 * slope(iR, u_at);
    }
    const double p_L = detail::pressure_raw(spec, rho_L);
    const double p_R = detail::pressure_raw(spec, rho_R);
    const double c_L = detail::sound_speed_raw(spec, rho_L);
    const double c_R = detail::sound_speed_raw(spec, rho_R);
    const double speed = std::max(std::abs(u_L) + c_L, std::abs(u_R) + c_R);
    const double m_L = rho_L * u_L;
    const double m_R = rho_R * u_R;
    ws.flux_rho[f] = 0.5 * (m_L + m_R) - 0.5 * speed * (rho_R - rho_L);
    ws.flux_m[f] = 0.5 * (m_L * u_L + p_L + m_R * u_R + p_R) - 0.5 * speed * (m_R - m_L);

    // divergence (1/w) d(w u)/dr at the face, from cell-center values
    double wL, wR;
    if (alpha == 0) {
      wL = wR = 1.0;
    } else {
      const double rL = s.r_min + (static_cast<double>(iL) + 0.5) * h;
      const double rR = s.r_min + (static_cast<double>(iR) + 0.5) * h;
      wL = rL * rL;
      wR = rR * rR;
    }
    ws.theta[f] = (wR * u_at(iR) - wL * u_at(iL)) / (h * ws.w_face[f]);
  }

  k_rho.resize(n);
  k_m.resize(n);
  const bool has_source = static_cast<bool>(opts.hooks.source);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = ws.w_center[i];
    const double inv = 1.0 / (wi * h);
    k_rho[i] = -(ws.w_face[i + 1] * ws.flux_rho[i + 1] - ws.w_face[i] * ws.flux_rho[i]) * inv;
    const double p_i = detail::pressure_raw(spec, rho[i]);
    const double geom = p_i * (ws.w_face[i + 1] - ws.w_face[i]) * inv;
    const double visc = nu * (ws.theta[i + 1] - ws.theta[i]) / h;
    k_m[i] = -(ws.w_face[i + 1] * ws.flux_m[i + 1] - ws.w_face[i] * ws.flux_m[i]) * inv + geom +
             visc;
    if (has_source) {
      double s_rho = 0.0, s_m = 0.0;
      opts.hooks.source(s.center(i), t, s_rho, s_m);
      k_rho[i] += s_rho;
      k_m[i] += s_m;
    }
  }
}

void clamp_state(FluidState& s, const ClampBounds& cb) {
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (!(s.rho[i] >= cb.floor)) {
      s.rho[i] = cb.floor;
      ++s.clamp_events;
    } else if (!(s.rho[i] <= cb.cap)) {
      s.rho[i] = cb.cap;
      ++s.clamp_events;
    }
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.m[i])) {
      fail(ErrorCode::NonFiniteState,
           "non-finite state in cell " + std::to_string(i) + " at t = " + std::to_string(s.t));
    }
  }
}

}  // namespace

double cfl_dt(const FluidState& state, const Eos& eos, const BoundaryData& bdata,
              double cfl) {
  const EosSpec& spec = eos.spec();
  double lambda_max = 0.0;
  double rho_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.n_cells(); ++i) {
    const double u = state.m[i] / state.rho[i];
    lambda_max = std::max(lambda_max, std::abs(u) + detail::sound_speed_raw(spec, state.rho[i]));
    rho_min = std::min(rho_min, state.rho[i]);
  }
  const double conv = state.h / lambda_max;
  const double visc = state.h * state.h * rho_min / (2.0 * bdata.nu());
  return cfl * std::min(conv, visc);
}

void step(FluidState& state, const Eos& eos, const BoundaryData& bdata, double dt,
          const StepOptions& opts, StepWorkspace& ws) {
  refresh_weights(ws, state);
  const ClampBounds cb = clamp_bounds(eos);
  const std::size_t n = state.n_cells();

  stage_rhs(state, eos, bdata, state.rho, state.m, state.t, opts, ws, ws.k_rho, ws.k_m);
  ws.rho1.resize(n);
  ws.m1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ws.rho1[i] = state.rho[i] + dt * ws.k_rho[i];
    ws.m1[i] = state.m[i] + dt * ws.k_m[i];
  }

  stage_rhs(state, eos, bdata, ws.rho1, ws.m1, state.t + dt, opts, ws, ws.k_rho, ws.k_m);
  for (std::size_t i = 0; i < n; ++i) {
    state.rho[i] = 0.5 * state.rho[i] + 0.5 * (ws.rho1[i] + dt * ws.k_rho[i]);
    state.m[i] = 0.5 * state.m[i] + 0.5 * (ws.m1[i] + dt * ws.k_m[i]);
  }
  state.t += dt;
  clamp_state(state, cb);
}

void reduced_equations_residual_fields(const FluidState& s, const Eos& eos,
                                       const BoundaryData& b, std::vector<double>& rc,
                                       std::vector<double>& rm) {
  const std::size_t n = s.n_cells();
  const double h = s.h;
  const double nu = b.nu();
  const int alpha = s.geometry.alpha;
  const EosSpec& spec = eos.spec();
  rc.assign(n, 0.0);
  rm.assign(n, 0.0);
  const auto w = [&](std::size_t i) {
    const double r = s.center(i);
    return alpha == 0 ? 1.0 : r * r;
  };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double u_p = s.m[i + 1] / s.rho[i + 1];
    const double u_c = s.m[i] / s.rho[i];
    const double u_m = s.m[i - 1] / s.rho[i - 1];
    rc[i] = (w(i + 1) * s.m[i + 1] - w(i - 1) * s.m[i - 1]) / (2.0 * h) / w(i);

    const double conv =
        (w(i + 1) * s.m[i + 1] * u_p - w(i - 1) * s.m[i - 1] * u_m) / (2.0 * h) / w(i);
    const double dp = (detail::pressure_raw(spec, s.rho[i + 1]) -
                       detail::pressure_raw(spec, s.rho[i - 1])) /
                      (2.0 * h);
    double visc = (u_p - 2.0 * u_c + u_m) / (h * h);
    if (alpha != 0) {
      visc += alpha * (u_p / s.center(i + 1) - u_m / s.center(i - 1)) / (2.0 * h);
    }
    rm[i] = conv + dp - nu * visc;
  }
}

EvolveResiduals reduced_equations_residual(const FluidState& s, const Eos& eos,
                                           const BoundaryData& b) {
  std::vector<double> rc, rm;
  reduced_equations_residual_fields(s, eos, b, rc, rm);
  EvolveResiduals out;
  for (std::size_t i = 0; i < rc.size(); ++i) {
    out.continuity = std::max(out.continuity, std::abs(rc[i]));
    out.momentum = std::max(out.momentum, std::abs(rm[i]));
  }
  return out;
}

namespace {

// splitmix64, used only to derive a deterministic perturbation phase
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

FluidState make_initial_state(const RunConfig& cfg, const Eos& eos,
                              const ProfileOnCenters& steady) {
  const double lo = cfg.geometry.inner();
  const double hi = cfg.geometry.outer();
  FluidState s;
  s.geometry = cfg.geometry;
  s.r_min = lo;
  s.h = (hi - lo) / static_cast<double>(cfg.n_cells);
  s.rho.resize(cfg.n_cells);
  s.m.resize(cfg.n_cells);
  const ClampBounds cb = clamp_bounds(eos);

  double phase = 0.0;
  if (cfg.seed != 0) {
    const double unit =
        static_cast<double>(mix64(cfg.seed) >> 11) * 0x1.0p-53;  // [0, 1)
    phase = 2.0 * M_PI * unit;
  }

  for (std::size_t i = 0; i < cfg.n_cells; ++i) {
    double rho = steady.rho[i];
    if (cfg.initial.kind == InitialKind::Perturbed && cfg.initial.amplitude != 0.0) {
      const double r = s.center(i);
      const double xi = (r - lo) / (hi - lo);
      double window = 1.0;
      if (cfg.initial.support) {
        const auto [a, bsup] = *cfg.initial.support;
        if (r <= a || r >= bsup) {
          window = 0.0;
        } else {
          const double eta = (r - a) / (bsup - a);
          const double sw = std::sin(M_PI * eta);
          window = sw * sw;
        }
      }
      rho *= 1.0 + cfg.initial.amplitude * window *
                       std::sin(2.0 * M_PI * cfg.initial.mode * xi + phase);
    }
    s.rho[i] = std::clamp(rho, cb.floor, cb.cap);
    s.m[i] = steady.rho[i] * steady.u[i];  // steady momentum is kept
  }
  return s;
}

RunStats advance(FluidState& state, const Eos& eos, const BoundaryData& bdata,
                 const RunConfig& cfg, const std::function<void(const FluidState&)>& on_sample,
                 const StepOptions& opts,
                 const std::function<void(const FluidState&)>& on_snapshot) {
  // merged, sorted stop list: sample grid, snapshot times, t_end
  struct Stop {
    double t;
    bool sample, snapshot;
  };
  std::vector<Stop> stops;
  const double t0 = state.t;
  for (std::size_t j = 0;; ++j) {
    const double ts = t0 + static_cast<double>(j) * cfg.sample_dt;
    if (ts >= cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end)) break;
    stops.push_back({ts, true, false});
  }
  stops.push_back({cfg.t_end, true, false});
  for (double ts : cfg.snapshot_times) {
    if (ts >= t0 && ts <= cfg.t_end) stops.push_back({ts, false, true});
  }
  std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.t < b.t; });

  StepWorkspace ws;
  RunStats stats;
  const auto wall_start = std::chrono::steady_clock::now();
  const double snap = 1e-12 * std::max(1.0, cfg.t_end);

  std::size_t k = 0;
  while (k < stops.size()) {
    // coalesce stops at (numerically) the same time
    bool want_sample = false, want_snapshot = false;
    const double target = stops[k].t;
    while (k < stops.size() && stops[k].t <= target + snap) {
      want_sample |= stops[k].sample;
      want_snapshot |= stops[k].snapshot;
      ++k;
    }
    while (state.t < target - snap) {
      double dt = cfl_dt(state, eos, bdata, cfg.cfl);
      dt = std::min(dt, target - state.t);
      step(state, eos, bdata, dt, opts, ws);
      ++stats.n_steps;
      if (cfg.wall_clock_budget_s > 0.0 && (stats.n_steps & 63u) == 0u) {
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - wall_start;
        if (elapsed.count() > cfg.wall_clock_budget_s) {
          fail(ErrorCode::WallClockBudget, "wall clock budget exceeded at t = " +
                                               std::to_string(state.t));
        }
      }
    }
    state.t = target;
    if (want_sample && on_sample) on_sample(state);
    if (want_snapshot && on_snapshot) on_snapshot(state);
  }
  stats.clamp_events = state.clamp_events;
  return stats;
}

// ---------------------------------------------------------------------------
// Method of manufactured solutions
// ---------------------------------------------------------------------------
namespace {

// rho* = rho0 + a_rho sin(k r - omega t), u* = u0 + a_u cos(k r - omega t)
struct Manufactured {
  double rho0 = 1.0, a_rho = 0.1;
  double u0 = 0.5, a_u = 0.1;
  double k = 2.0 * M_PI, omega = 1.0;

  double rho(double r, double t) const { return rho0 + a_rho * std::sin(k * r - omega * t); }
  double u(double r, double t) const { return u0 + a_u * std::cos(k * r - omega * t); }
  double drho_dt(double r, double t) const { return -a_rho * omega * std::cos(k * r - omega * t); }
  double drho_dr(double r, double t) const { return a_rho * k * std::cos(k * r - omega * t); }
  double du_dt(double r, double t) const { return a_u * omega * std::sin(k * r - omega * t); }
  double du_dr(double r, double t) const { return -a_u * k * std::sin(k * r - omega * t); }
  double d2u_dr2(double r, double t) const { return -a_u * k * k * std::cos(k * r - omega * t); }
};

struct MmsSources {
  const EosSpec* spec;
  Manufactured f;
  int alpha;
  double nu;

  void operator()(double r, double t, double& s_rho, double& s_m) const {
    const double rho = f.rho(r, t);
    const double u = f.u(r, t);
    const double rho_r = f.drho_dr(r, t);
    const double u_r = f.du_dr(r, t);
    const double geom = (alpha == 0) ? 0.0 : static_cast<double>(alpha) / r;

    s_rho = f.drho_dt(r, t) + rho_r * u + rho * u_r + geom * rho * u;

    const double dp = detail::dpressure_raw(*spec, rho) * rho_r;
    const double conv = rho_r * u * u + 2.0 * rho * u * u_r + geom * rho * u * u;
    double visc = f.d2u_dr2(r, t);
    if (alpha != 0) visc += static_cast<double>(alpha) * (u_r / r - u / (r * r));
    s_m = f.drho_dt(r, t) * u + rho * f.du_dt(r, t) + conv + dp - nu * visc;
  }
};

}  // namespace

MmsResult mms_convergence(const Eos& eos, const Geometry& geometry, bool second_order,
                          std::size_t base_cells, int levels) {
  const double lo = (geometry.alpha == 0) ? 0.0 : 1.0;
  const double hi = lo + 1.0;
  BoundaryData b;
  b.mu = 0.01;
  b.lambda = 0.0;
  Manufactured f;
  MmsSources src{&eos.spec(), f, geometry.alpha, b.nu()};
  const double t_end = 0.25;

  MmsResult out;
  for (int lev = 0; lev < levels; ++lev) {
    const std::size_t n = base_cells << lev;
    FluidState s;
    s.geometry = geometry;
    s.geometry.alpha = geometry.alpha;
    s.r_min = lo;
    s.h = (hi - lo) / static_cast<double>(n);
    s.rho.resize(n);
    s.m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = s.center(i);
      s.rho[i] = f.rho(r, 0.0);
      s.m[i] = f.rho(r, 0.0) * f.u(r, 0.0);
    }

    StepOptions opts;
    opts.second_order = second_order;
    opts.hooks.source = src;
    opts.hooks.ghosts = [&, h = s.h](double t) {
      GhostStates g;
      const double rl = lo - 0.5 * h;
      const double rr = hi + 0.5 * h;
      g.rho_l = f.rho(rl, t);
      g.u_l = f.u(rl, t);
      g.rho_r = f.rho(rr, t);
      g.u_r = f.u(rr, t);
      return g;
    };

    StepWorkspace ws;
    while (s.t < t_end - 1e-14) {
      double dt = cfl_dt(s, eos, b, 0.45);
      dt = std::min(dt, t_end - s.t);
      step(s, eos, b, dt, opts, ws);
    }

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = s.center(i);
      err += std::abs(s.rho[i] - f.rho(r, t_end)) * s.h;
      err += std::abs(s.m[i] - f.rho(r, t_end) * f.u(r, t_end)) * s.h;
    }
    out.cells.push_back(n);
    out.errors.push_back(err);
  }

  // least-squares slope of ln(err) against ln(h)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n_pts = static_cast<double>(out.errors.size());
  for (std::size_t i = 0; i < out.errors.size(); ++i) {
    const double x = std::log(1.0 / static_cast<double>(out.cells[i]));
    const double y = std::log(out.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.observed_order = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
  return out;
}

void RunConfig::validate() const {
  geometry.validate();
  if (!(n_cells >= 16)) fail(ErrorCode::ConfigError, "n_cells must be at least 16");
  if (!(cfl > 0.0 && cfl <= 0.9)) fail(ErrorCode::ConfigError, "cfl must lie in (0, 0.9]");
  if (!(t_end > 0.0)) fail(ErrorCode::ConfigError, "t_end must be positive");
  if (!(sample_dt > 0.0)) fail(ErrorCode::ConfigError, "sample_dt must be positive");
  if (initial.amplitude < 0.0) fail(ErrorCode::ConfigError, "amplitude must be >= 0");
}

}  // namespace barostab

