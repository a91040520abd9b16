#include "barostab/relenergy.hpp"

#include <algorithm>
#include <cmath>

namespace barostab {
namespace {

inline double weight(int alpha, double r) { return alpha == 0 ? 1.0 : r * r; }

}  // namespace

double relative_energy(const FluidState& s, const ProfileOnCenters& prof, const Eos& eos) {
  const int alpha = s.geometry.alpha;
  double acc = 0.0;
  for (std::size_t i = 0; i < s.n_cells(); ++i) {
    const double u = s.m[i] / s.rho[i];
    const double v = u - prof.u[i];
    const double cell = 0.5 * s.rho[i] * v * v + eos.relative_potential(s.rho[i], prof.rho[i]);
    acc += cell * weight(alpha, s.center(i)) * s.h;
  }
  return acc;
}

double dissipation(const FluidState& s, const ProfileOnCenters& prof, double mu,
                   double lambda) {
  const std::size_t n = s.n_cells();
  const int alpha = s.geometry.alpha;
  const double h = s.h;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = s.m[i] / s.rho[i] - prof.u[i];

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dv;
    if (i == 0) {
      dv = (v[1] - v[0]) / h;
    } else if (i + 1 == n) {
      dv = (v[n - 1] - v[n - 2]) / h;
    } else {
      dv = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    double cell;
    if (alpha == 0) {
      cell = ((4.0 / 3.0) * mu + lambda) * dv * dv;
    } else {
      const double q = v[i] / s.center(i);
      const double div = dv + 2.0 * q;
      cell = 2.0 * mu * (dv * dv + 2.0 * q * q) + (lambda - 2.0 * mu / 3.0) * div * div;
    }
    acc += cell * weight(alpha, s.center(i)) * h;
  }
  return acc;
}

RelEnergySample inequality_ledger(const FluidState& s, const ProfileOnCenters& prof,
                                  const Eos& eos, const BoundaryData& b) {
  const std::size_t n = s.n_cells();
  const int alpha = s.geometry.alpha;
  const double h = s.h;
  const EosSpec& spec = eos.spec();

  RelEnergySample out;
  out.t = s.t;
  out.E = relative_energy(s, prof, eos);
  out.D = dissipation(s, prof, b.mu, b.lambda);

  const bool exterior = s.geometry.kind == GeometryKind::Exterior;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.center(i);
    const double w = weight(alpha, r);
    const double u = s.m[i] / s.rho[i];
    const double v = u - prof.u[i];
    const double relp = eos.relative_pressure(s.rho[i], prof.rho[i]);

    out.T_grad -= s.rho[i] * v * v * prof.du[i] * w * h;
    out.T_press += relp * prof.div[i] * w * h;

    // (rho/rho_s - 1)(u_s - u)(rho_s u_s du_s + p'(rho_s) drho_s)
    const double drho_s = -prof.rho[i] * prof.div[i] / prof.u[i];
    const double forcing = prof.rho[i] * prof.u[i] * prof.du[i] +
                           detail::dpressure_raw(spec, prof.rho[i]) * drho_s;
    out.T_rem += (s.rho[i] / prof.rho[i] - 1.0) * (prof.u[i] - u) * forcing * w * h;

    if (exterior) {
      const double r7 = std::pow(r, 7);
      out.W_relp += relp / r7 * w * h;
      const double gap = s.rho[i] - prof.rho[i];
      out.W_rho += gap * gap / r7 * w * h;
    }
  }

  // boundary Bregman terms; traces on the outflow side come from the
  // adjacent cell (the scheme's extrapolated boundary density)
  if (exterior) {
    const double r_in = s.face(0);
    out.B_out = weight(alpha, r_in) * b.u_B *
                eos.relative_potential(s.rho.front(), prof.rho_face_in);
    out.B_in = 0.0;  // far field carries no boundary flux (u.n = 0)
  } else {
    const double r_out = s.face(n);
    const double r_in = s.face(0);
    out.B_out = weight(alpha, r_out) * b.u_B_plus *
                eos.relative_potential(s.rho.back(), prof.rho_face_out);
    out.B_in = weight(alpha, r_in) * b.u_B_minus *
               eos.relative_potential(b.rho_B, prof.rho_face_in);
  }
  return out;
}

void finalize_ledger(std::vector<RelEnergySample>& samples, double uptick_tol) {
  const std::size_t n = samples.size();
  if (n < 2) return;
  double running_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running_max = std::max(running_max, samples[k].E);
    double dEdt;
    if (k == 0) {
      dEdt = (samples[1].E - samples[0].E) / (samples[1].t - samples[0].t);
    } else if (k + 1 == n) {
      dEdt = (samples[n - 1].E - samples[n - 2].E) / (samples[n - 1].t - samples[n - 2].t);
    } else {
      dEdt = (samples[k + 1].E - samples[k - 1].E) / (samples[k + 1].t - samples[k - 1].t);
    }
    auto& sm = samples[k];
    sm.lhs_minus_rhs = sm.T_grad - sm.T_press + sm.T_rem - dEdt - sm.D - sm.B_out - sm.B_in;
    sm.monotone_flag =
        (k == 0) || (sm.E - samples[k - 1].E <= uptick_tol * running_max + 1e-300);
  }
}

DecayReport decay_report(std::span<const RelEnergySample> samples, double transient_time,
                         double uptick_tol) {
  if (samples.size() < 10) {
    fail(ErrorCode::InsufficientSamples, "decay report needs at least 10 samples");
  }
  DecayReport rep;
  rep.n_samples = samples.size();
  rep.transient_time = transient_time;
  rep.initial_E = samples.front().E;
  rep.final_E = samples.back().E;

  std::size_t first_post = samples.size() - 1;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].t >= transient_time) {
      first_post = k;
      break;
    }
  }
  rep.post_transient_E = samples[first_post].E;

  double e_scale = 0.0;
  for (std::size_t k = first_post; k < samples.size(); ++k) {
    e_scale = std::max(e_scale, samples[k].E);
  }
  for (std::size_t k = first_post + 1; k < samples.size(); ++k) {
    rep.largest_uptick = std::max(rep.largest_uptick, samples[k].E - samples[k - 1].E);
  }
  rep.uptick_tolerance = uptick_tol * e_scale;

  // trajectories started at the steady state sit at the quadrature floor;
  // the monotone verdict is trivially PASS there
  const double floor = 1e-13 * (1.0 + std::abs(rep.initial_E));
  if (rep.initial_E <= floor) {
    rep.monotone_pass = true;
    rep.final_over_post_transient = 0.0;
  } else {
    rep.monotone_pass = rep.largest_uptick <= rep.uptick_tolerance;
    rep.final_over_post_transient =
        rep.post_transient_E > 0.0 ? rep.final_E / rep.post_transient_E : 0.0;
  }

  // exponential rate over the final half (least squares on ln E)
  const std::size_t half = samples.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t k = half; k < samples.size(); ++k) {
    if (samples[k].E > 0.0) {
      const double x = samples[k].t;
      const double y = std::log(samples[k].E);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
  }
  if (cnt >= 2) {
    const double denom = static_cast<double>(cnt) * sxx - sx * sx;
    if (denom != 0.0) rep.fitted_decay_rate = -(static_cast<double>(cnt) * sxy - sx * sy) / denom;
  }

  // time integrals (trapezoid over samples)
  double c9d_first_half = 0.0;
  const double t_mid = 0.5 * (samples.front().t + samples.back().t);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double dt = samples[k].t - samples[k - 1].t;
    rep.dissipation_time_integral += 0.5 * (samples[k].D + samples[k - 1].D) * dt;
    const double c9c = 0.5 * (samples[k].W_relp + samples[k - 1].W_relp) * dt;
    const double c9d = 0.5 * (samples[k].W_rho + samples[k - 1].W_rho) * dt;
    rep.c9c_cumulative += c9c;
    rep.c9d_cumulative += c9d;
    if (samples[k].t <= t_mid) c9d_first_half += c9d;
  }
  rep.c9d_tail_fraction =
      rep.c9d_cumulative > 0.0 ? 1.0 - c9d_first_half / rep.c9d_cumulative : 0.0;

  rep.pass = rep.monotone_pass;
  return rep;
}

}  // namespace barostab
