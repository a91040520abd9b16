#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "barostab/eos.hpp"
#include "barostab/geometry.hpp"

namespace barostab {

/// Discretized steady state on a uniform node grid r_0 < ... < r_N.
///
/// Sign conventions: strip/annulus carry u_tilde > 0; the exterior profile
/// carries u_tilde < 0 with u_tilde(r_bar) = -u_B (the outer normal of the
/// exterior domain points toward the origin, so outflow u.n = u_B > 0 means
/// a negative radial component).
struct SteadyProfile {
  Geometry geometry;
  BoundaryData boundary;
  std::vector<double> grid;
  std::vector<double> rho_tilde;
  std::vector<double> u_tilde;
  std::vector<double> du_tilde;
  std::vector<double> div_u;
  /// Exterior only: rho_inf - rho_tilde carried without cancellation, the
  /// quantity behind the r^-4 far-field decay.
  std::vector<double> rho_deficit;

  /// Strip: momentum integration constant. Annulus: matched initial slope.
  /// Exterior: far-field amplitude A of u ~ -A/r^2.
  double Lambda = 0.0;
  /// Conserved r^alpha rho u (negative for the exterior).
  double mass_flux = 0.0;
  double residual_continuity = 0.0;
  double residual_momentum = 0.0;
  bool nonmonotone_shooting = false;
  bool truncation_warning = false;
};

struct SolverOptions {
  double tol = 1e-10;
  std::size_t n_cells = 4096;
  /// Exterior: re-solve with doubled r_trunc and flag the profile when the
  /// two disagree beyond tol.
  bool check_truncation = true;
};

/// One explicit integration of the strip first integral
///   nu du/dr = p(rho_B u_B^- / u) + rho_B u_B^- u + Lambda,  u(0) = u_B^-,
/// sampled on n_cells+1 uniform nodes.
struct StripVelocity {
  std::vector<double> grid;
  std::vector<double> u;
  double terminal = 0.0;
};
StripVelocity integrate_strip_velocity(const Eos& eos, const BoundaryData& bdata,
                                       double Lambda, std::size_t n_cells);

/// Bisection on Lambda (certified by the comparison principle: the terminal
/// velocity is strictly increasing in Lambda) to match u(1) = u_B^+.
SteadyProfile solve_strip_steady(const Eos& eos, const BoundaryData& bdata,
                                 const SolverOptions& opts = {});

/// Shooting on the initial slope of the second-order annulus momentum ODE;
/// bracketed secant with bisection fallback, non-monotone terminal maps are
/// flagged on the returned profile.
SteadyProfile solve_annulus_steady(const Eos& eos, const BoundaryData& bdata,
                                   const Geometry& geometry,
                                   const SolverOptions& opts = {});

/// Inward integration from r_trunc with the far-field state set by the decay
/// ansatz u ~ -A/r^2, shooting on the amplitude A to match u(r_bar) = -u_B.
/// Integrates the exact deviation system (u + A/r^2, rho_inf - rho), which
/// keeps the r^-4 density deficit meaningful in double precision.
SteadyProfile solve_exterior_steady(const Eos& eos, const BoundaryData& bdata,
                                    const Geometry& geometry,
                                    const SolverOptions& opts = {});

/// Independent second-order centered-difference residuals of the reduced
/// steady equations; the cross-check oracle for all three solvers.
struct SteadyResiduals {
  double continuity = 0.0;
  double momentum = 0.0;
};
SteadyResiduals steady_residual(const SteadyProfile& profile, const Eos& eos);

/// Per-node residuals behind steady_residual (zeros at the end nodes).
void steady_residual_fields(const SteadyProfile& profile, const Eos& eos,
                            std::vector<double>& continuity, std::vector<double>& momentum);

/// Log-log least-squares exponents of the exterior far-field decay over the
/// outer decade [r_trunc/10, r_trunc]: rho_inf - rho ~ r^-4, |u| ~ r^-2,
/// du ~ r^-3.
struct ExteriorDecayFits {
  double slope_deficit = 0.0;
  double slope_u = 0.0;
  double slope_du = 0.0;
};
ExteriorDecayFits fit_exterior_decay(const SteadyProfile& profile);

/// Strip vs annulus profiles on [r, r+1] with shared boundary data.
struct FlatCurvedRow {
  double r = 0.0;
  double dist_u = 0.0;
  double dist_du = 0.0;
  double dist_rho = 0.0;
};
std::vector<FlatCurvedRow> flat_curved_comparison(const Eos& eos, const BoundaryData& bdata,
                                                  std::span<const double> r_list,
                                                  const SolverOptions& opts = {});

/// Profile fields cubic-Hermite-resampled onto finite-volume cell centers
/// r_min + (i + 1/2) h. Node derivatives of u and rho are the exact ODE
/// values stored on the profile.
struct ProfileOnCenters {
  std::vector<double> r, rho, u, du, div;
  /// Profile traces at the domain faces (used by the boundary Bregman terms).
  double rho_face_in = 0.0, rho_face_out = 0.0;
};
ProfileOnCenters resample_to_centers(const SteadyProfile& profile, double r_min, double h,
                                     std::size_t n_cells);

}  // namespace barostab
