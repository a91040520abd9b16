#include "barostab/eos.hpp"

#include <algorithm>
#include <cmath>

#include "barostab/quadrature.hpp"

namespace barostab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DensityOutOfRange: return "DensityOutOfRange";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BlowDown: return "BlowDown";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ToleranceFailure: return "ToleranceFailure";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::WallClockBudget: return "WallClockBudget";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return v;
}

}  // namespace

PotentialTable PotentialTable::build(const EosSpec& spec, std::size_t n_nodes) {
  PotentialTable t;
  t.spec_ = spec;
  t.rho0_ = 1e-3 * spec.rho_bar;
  t.split_ = 0.5 * spec.rho_bar;

  const std::size_t half = n_nodes / 2;
  // Lower block log-spaced in rho, upper block log-spaced in the gap
  // rho_bar - rho, which clusters nodes toward the blow-up.
  std::vector<double> lower = logspace(1e-9 * spec.rho_bar, t.split_, half);
  std::vector<double> gaps = logspace(t.split_, 1e-9 * spec.rho_bar, half + 1);
  std::vector<double> upper;
  upper.reserve(half);
  for (std::size_t i = 1; i < gaps.size(); ++i) upper.push_back(spec.rho_bar - gaps[i]);

  t.densities_ = lower;
  t.densities_.insert(t.densities_.end(), upper.begin(), upper.end());

  const auto integrand = [&spec](double s) { return detail::pressure_raw(spec, s) / (s * s); };

  // Cumulative integral along the node chain, then shifted so Q(rho0) = 0.
  std::vector<double> cum(t.densities_.size(), 0.0);
  for (std::size_t i = 1; i < t.densities_.size(); ++i) {
    cum[i] = cum[i - 1] + integrate_gk(integrand, t.densities_[i - 1], t.densities_[i], 1e-12);
  }
  const double at_anchor = integrate_gk(integrand, t.densities_.front(), t.rho0_, 1e-12);
  for (auto& c : cum) c -= at_anchor;
  t.values_ = cum;

  // Hermite blocks in transformed coordinates with exact slopes
  // dQ/dx = p/rho^2 * drho/dx.
  std::vector<double> xl(half), yl(half), dl(half);
  for (std::size_t i = 0; i < half; ++i) {
    const double rho = lower[i];
    xl[i] = std::log(rho);
    yl[i] = cum[i];
    dl[i] = detail::pressure_raw(spec, rho) / rho;
  }
  t.lower_ = CubicHermite(std::move(xl), std::move(yl), std::move(dl));

  std::vector<double> xu(half + 1), yu(half + 1), du(half + 1);
  for (std::size_t i = 0; i <= half; ++i) {
    const std::size_t k = (i == 0) ? half - 1 : half + i - 1;
    const double rho = t.densities_[k];
    xu[i] = -std::log(spec.rho_bar - rho);
    yu[i] = cum[k];
    du[i] = detail::pressure_raw(spec, rho) / (rho * rho) * (spec.rho_bar - rho);
  }
  t.upper_ = CubicHermite(std::move(xu), std::move(yu), std::move(du));
  return t;
}

double PotentialTable::q(double rho) const {
  if (rho < densities_.front() || rho > densities_.back()) return q_quadrature(rho);
  if (rho <= split_) return lower_(std::log(rho));
  return upper_(-std::log(spec_.rho_bar - rho));
}

double PotentialTable::q_quadrature(double rho) const {
  const auto integrand = [this](double s) { return detail::pressure_raw(spec_, s) / (s * s); };
  // start from the nearest tabulated node to keep the interval short
  auto it = std::lower_bound(densities_.begin(), densities_.end(), rho);
  std::size_t i = (it == densities_.end()) ? densities_.size() - 1
                                           : static_cast<std::size_t>(it - densities_.begin());
  if (i > 0 && rho - densities_[i - 1] < densities_[i] - rho) --i;
  return values_[i] + integrate_gk(integrand, densities_[i], rho, 1e-14);
}

Eos::Eos(EosSpec spec) : spec_(spec) {
  if (!(spec_.a > 0.0)) fail(ErrorCode::ConfigError, "EOS coefficient a must be positive");
  if (spec_.kind == EosKind::Isentropic) {
    if (!(spec_.gamma > 1.0)) fail(ErrorCode::ConfigError, "isentropic EOS needs gamma > 1");
    spec_.rho_bar = std::numeric_limits<double>::infinity();
  } else {
    if (!(spec_.beta > 0.0)) fail(ErrorCode::ConfigError, "hard-sphere EOS needs beta > 0");
    if (!(spec_.rho_bar > 0.0) || !std::isfinite(spec_.rho_bar)) {
      fail(ErrorCode::ConfigError, "hard-sphere EOS needs finite rho_bar > 0");
    }
    if (std::isnan(spec_.rho_ref)) spec_.rho_ref = 0.5 * spec_.rho_bar;
    if (!(spec_.rho_ref > 0.0 && spec_.rho_ref < spec_.rho_bar)) {
      fail(ErrorCode::ConfigError, "rho_ref must lie in (0, rho_bar)");
    }
    table_ = PotentialTable::build(spec_);
  }
  // Convexity sanity sweep: p'' > 0 on a log-spaced sample of the domain.
  const double hi = std::isfinite(spec_.rho_bar) ? 0.999 * spec_.rho_bar : 1e3;
  for (double rho = 1e-6 * hi; rho < hi; rho *= 1.9) {
    if (!(detail::d2pressure_raw(spec_, rho) > 0.0)) {
      fail(ErrorCode::ConfigError, "pressure law is not strictly convex");
    }
  }
}

void Eos::check_density(double rho, double lo) const {
  if (!(rho >= lo) || !(rho < spec_.rho_bar) || !std::isfinite(rho)) {
    fail(ErrorCode::DensityOutOfRange,
         "rho = " + std::to_string(rho) + " outside [" + std::to_string(lo) + ", rho_bar)");
  }
}

double Eos::pressure(double rho) const {
  check_density(rho, 0.0);
  return detail::pressure_raw(spec_, rho);
}

double Eos::pressure_derivative(double rho) const {
  check_density(rho, 0.0);
  return detail::dpressure_raw(spec_, rho);
}

double Eos::pressure_second_derivative(double rho) const {
  check_density(rho, 0.0);
  return detail::d2pressure_raw(spec_, rho);
}

double Eos::sound_speed(double rho) const {
  check_density(rho, 0.0);
  return detail::sound_speed_raw(spec_, rho);
}

double Eos::pressure_potential(double rho) const {
  check_density(rho, 0.0);
  if (spec_.kind == EosKind::Isentropic) {
    if (spec_.gamma == 2.0) return spec_.a * rho * rho;
    return spec_.a * std::pow(rho, spec_.gamma) / (spec_.gamma - 1.0);
  }
  return rho * table_.q(rho);
}

double Eos::pressure_potential_quadrature(double rho) const {
  check_density(rho, 0.0);
  if (spec_.kind == EosKind::Isentropic) return pressure_potential(rho);
  return rho * table_.q_quadrature(rho);
}

double Eos::potential_derivative(double rho) const {
  check_density(rho, 1e-300);
  return (pressure_potential(rho) + detail::pressure_raw(spec_, rho)) / rho;
}

double Eos::relative_potential(double rho, double R) const {
  check_density(rho, 0.0);
  check_density(R, 1e-300);
  return pressure_potential(rho) - potential_derivative(R) * (rho - R) -
         pressure_potential(R);
}

double Eos::relative_pressure(double rho, double R) const {
  check_density(rho, 0.0);
  check_density(R, 0.0);
  return detail::pressure_raw(spec_, rho) - detail::dpressure_raw(spec_, R) * (rho - R) -
         detail::pressure_raw(spec_, R);
}

}  // namespace barostab
