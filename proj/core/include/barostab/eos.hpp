#pragma once

#include <cmath>
#include <limits>

#include "barostab/errors.hpp"
#include "barostab/hermite.hpp"

namespace barostab {

enum class EosKind { Isentropic, HardSphere };

/// Barotropic pressure law description.
///
/// Isentropic:   p(rho) = a rho^gamma,                       gamma > 1
/// Hard-sphere:  p(rho) = a [ (rho_bar/(rho_bar-rho))^beta - 1 ],  beta > 0
///
/// The hard-sphere closed form has p(0) = 0, p' > 0, p'' > 0 on
/// (0, rho_bar) and blows up like (rho_bar - rho)^{-beta}.
struct EosSpec {
  EosKind kind = EosKind::Isentropic;
  double a = 1.0;
  double gamma = 2.0;
  double beta = 1.0;
  double rho_bar = std::numeric_limits<double>::infinity();
  /// Quadrature anchor for the hard-sphere pressure potential. Defaults to
  /// rho_bar/2 when left unset (NaN).
  double rho_ref = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Unchecked point evaluations, inlined for the flux/viscous loops. Callers
// guarantee 0 <= rho < rho_bar.
inline double pressure_raw(const EosSpec& s, double rho) {
  if (s.kind == EosKind::Isentropic) {
    if (s.gamma == 2.0) return s.a * rho * rho;
    return s.a * std::pow(rho, s.gamma);
  }
  const double x = rho / s.rho_bar;
  if (x < 0.25) {
    // q^beta - 1 cancels catastrophically for rho -> 0
    return s.a * std::expm1(-s.beta * std::log1p(-x));
  }
  const double q = s.rho_bar / (s.rho_bar - rho);
  if (s.beta == 1.0) return s.a * (q - 1.0);
  if (s.beta == 2.0) return s.a * (q * q - 1.0);
  if (s.beta == 3.0) return s.a * (q * q * q - 1.0);
  return s.a * (std::pow(q, s.beta) - 1.0);
}

inline double dpressure_raw(const EosSpec& s, double rho) {
  if (s.kind == EosKind::Isentropic) {
    if (s.gamma == 2.0) return 2.0 * s.a * rho;
    return s.a * s.gamma * std::pow(rho, s.gamma - 1.0);
  }
  const double d = s.rho_bar - rho;
  const double q = s.rho_bar / d;
  double qb;  // q^beta
  if (s.beta == 1.0) qb = q;
  else if (s.beta == 2.0) qb = q * q;
  else if (s.beta == 3.0) qb = q * q * q;
  else qb = std::pow(q, s.beta);
  return s.a * s.beta * qb / d;
}

inline double d2pressure_raw(const EosSpec& s, double rho) {
  if (s.kind == EosKind::Isentropic) {
    if (s.gamma == 2.0) return 2.0 * s.a;
    return s.a * s.gamma * (s.gamma - 1.0) * std::pow(rho, s.gamma - 2.0);
  }
  const double d = s.rho_bar - rho;
  return s.a * s.beta * (s.beta + 1.0) * std::pow(s.rho_bar / d, s.beta) / (d * d);
}

inline double sound_speed_raw(const EosSpec& s, double rho) {
  return std::sqrt(dpressure_raw(s, rho));
}

}  // namespace detail

/// Sampled pressure potential Q(rho) = \int_{rho0}^{rho} p(s)/s^2 ds for the
/// hard-sphere law, tabulated on log-spaced nodes clustered toward rho_bar
/// and interpolated by cubic Hermite segments with exact node slopes.
/// The anchor rho0 fixes the potential gauge (P(rho0) = 0).
class PotentialTable {
 public:
  PotentialTable() = default;
  static PotentialTable build(const EosSpec& spec, std::size_t n_nodes = 4096);

  /// Interpolated Q; falls back to direct quadrature outside the table range.
  double q(double rho) const;
  /// Direct adaptive quadrature from the nearest tabulated node (oracle-grade;
  /// slower than q()).
  double q_quadrature(double rho) const;

  bool empty() const { return densities_.empty(); }
  const std::vector<double>& densities() const { return densities_; }
  const std::vector<double>& values() const { return values_; }
  double anchor() const { return rho0_; }

 private:
  EosSpec spec_;
  double rho0_ = 0.0;   // gauge anchor
  double split_ = 0.0;  // block boundary (rho_bar/2)
  std::vector<double> densities_, values_;
  CubicHermite lower_, upper_;  // in log(rho) and -log(rho_bar - rho)
};

/// Immutable equation-of-state evaluator; safe to share across threads.
class Eos {
 public:
  explicit Eos(EosSpec spec);

  const EosSpec& spec() const { return spec_; }
  EosKind kind() const { return spec_.kind; }
  double rho_bar() const { return spec_.rho_bar; }

  double pressure(double rho) const;
  double pressure_derivative(double rho) const;
  double pressure_second_derivative(double rho) const;
  double sound_speed(double rho) const;

  /// Pressure potential P with P'(rho) rho - P(rho) = p(rho). Isentropic:
  /// a rho^gamma / (gamma - 1). Hard-sphere: rho Q(rho) via the table.
  double pressure_potential(double rho) const;
  /// P', evaluated through the identity P' = (P + p)/rho.
  double potential_derivative(double rho) const;
  /// Direct-quadrature P (bypasses table interpolation; used by oracles).
  double pressure_potential_quadrature(double rho) const;

  /// Bregman divergence of P: P(rho) - P'(R)(rho - R) - P(R).
  double relative_potential(double rho, double R) const;
  /// Bregman divergence of p (convex by p'' > 0).
  double relative_pressure(double rho, double R) const;

  const PotentialTable& table() const { return table_; }

 private:
  void check_density(double rho, double lo) const;

  EosSpec spec_;
  PotentialTable table_;
};

}  // namespace barostab
