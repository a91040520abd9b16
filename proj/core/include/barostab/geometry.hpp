#pragma once

#include "barostab/errors.hpp"

namespace barostab {

enum class GeometryKind { Strip, Annulus, Exterior };

/// Spatial domain of the 1-D symmetric reduction. The weight exponent alpha
/// selects the measure r^alpha dr (0 for the flat strip, 2 for radial).
struct Geometry {
  GeometryKind kind = GeometryKind::Strip;
  double r_minus = 0.0;  // annulus inner radius
  double r_plus = 1.0;   // annulus outer radius
  double r_bar = 1.0;    // exterior obstacle radius
  double r_trunc = 100.0;
  int alpha = 0;

  static Geometry strip() { return Geometry{GeometryKind::Strip, 0.0, 1.0, 0.0, 0.0, 0}; }
  static Geometry annulus(double rm, double rp) {
    return Geometry{GeometryKind::Annulus, rm, rp, 0.0, 0.0, 2};
  }
  static Geometry exterior(double rb, double rt) {
    return Geometry{GeometryKind::Exterior, 0.0, 0.0, rb, rt, 2};
  }

  double inner() const {
    switch (kind) {
      case GeometryKind::Strip: return 0.0;
      case GeometryKind::Annulus: return r_minus;
      case GeometryKind::Exterior: return r_bar;
    }
    return 0.0;
  }
  double outer() const {
    switch (kind) {
      case GeometryKind::Strip: return 1.0;
      case GeometryKind::Annulus: return r_plus;
      case GeometryKind::Exterior: return r_trunc;
    }
    return 1.0;
  }

  void validate() const {
    if (kind == GeometryKind::Annulus && !(0.0 < r_minus && r_minus < r_plus)) {
      fail(ErrorCode::ConfigError, "annulus requires 0 < r_minus < r_plus");
    }
    if (kind == GeometryKind::Exterior) {
      if (!(r_bar > 0.0)) fail(ErrorCode::ConfigError, "exterior requires r_bar > 0");
      if (!(r_trunc >= 50.0 * r_bar)) {
        fail(ErrorCode::ConfigError, "exterior requires r_trunc >= 50 r_bar");
      }
    }
    if (alpha != 0 && alpha != 2) fail(ErrorCode::ConfigError, "alpha must be 0 or 2");
  }
};

/// Boundary data and viscosity coefficients. Strip/annulus prescribe the
/// inflow pair (rho_B, u_B_minus) and the outflow speed u_B_plus; the
/// exterior prescribes the outflow speed u_B at the obstacle and the
/// far-field density rho_inf.
struct BoundaryData {
  double rho_B = 1.0;
  double u_B_minus = 0.1;
  double u_B_plus = 0.1;
  double u_B = 0.01;
  double rho_inf = 1.0;
  double mu = 1.0;
  double lambda = 0.0;

  /// Effective longitudinal viscosity (4/3) mu + lambda.
  double nu() const { return (4.0 / 3.0) * mu + lambda; }

  void validate(GeometryKind kind, double rho_bar) const {
    if (!(mu > 0.0) || !(lambda >= 0.0)) {
      fail(ErrorCode::ConfigError, "viscosities require mu > 0, lambda >= 0");
    }
    if (kind == GeometryKind::Exterior) {
      if (!(u_B > 0.0)) fail(ErrorCode::ConfigError, "exterior requires u_B > 0");
      if (!(rho_inf > 0.0 && rho_inf < rho_bar)) {
        fail(ErrorCode::ConfigError, "exterior requires 0 < rho_inf < rho_bar");
      }
    } else {
      if (!(rho_B > 0.0 && rho_B < rho_bar)) {
        fail(ErrorCode::ConfigError, "inflow density must satisfy 0 < rho_B < rho_bar");
      }
      if (!(u_B_minus > 0.0) || !(u_B_plus > 0.0)) {
        fail(ErrorCode::ConfigError, "boundary speeds must be positive");
      }
    }
  }
};

}  // namespace barostab
