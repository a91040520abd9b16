#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barostab/eos.hpp"
#include "barostab/geometry.hpp"

namespace barostab {

/// Cell-averaged conservative fields on a uniform grid of n cells.
/// Faces sit at r_min + i h, centers at r_min + (i + 1/2) h.
struct FluidState {
  Geometry geometry;
  double r_min = 0.0;
  double h = 0.0;
  std::vector<double> rho;
  std::vector<double> m;
  double t = 0.0;
  long clamp_events = 0;

  std::size_t n_cells() const { return rho.size(); }
  double center(std::size_t i) const { return r_min + (static_cast<double>(i) + 0.5) * h; }
  double face(std::size_t i) const { return r_min + static_cast<double>(i) * h; }
};

enum class InitialKind { Steady, Perturbed, Custom };

struct InitialCondition {
  InitialKind kind = InitialKind::Steady;
  double amplitude = 0.0;
  double mode = 1.0;
  /// Optional support window [lo, hi] for the perturbation; the sine is
  /// multiplied by a C^1 sin^2 bump inside the window and vanishes outside.
  std::optional<std::pair<double, double>> support;
  std::string path;  // custom snapshot CSV (r, rho, u)
};

struct RunConfig {
  EosSpec eos;
  Geometry geometry;
  BoundaryData boundary;
  std::size_t n_cells = 1024;
  double cfl = 0.45;
  double t_end = 1.0;
  double sample_dt = 0.1;
  bool second_order = false;
  InitialCondition initial;
  /// Transient window for monotonicity verdicts; <= 0 means the default
  /// 2 (domain length) / (inflow speed).
  double transient_time = 0.0;
  double wall_clock_budget_s = 0.0;  // 0 disables the budget
  unsigned long seed = 0;            // perturbation phase only
  std::vector<double> snapshot_times;

  void validate() const;
};

/// Boundary ghost states (cell-centered, one layer each side).
struct GhostStates {
  double rho_l = 0.0, u_l = 0.0;
  double rho_r = 0.0, u_r = 0.0;
};

/// Optional hooks used by the manufactured-solution runs: analytic source
/// densities (per cell center) and manufactured ghost states.
struct StepHooks {
  std::function<void(double r, double t, double& s_rho, double& s_m)> source;
  std::function<GhostStates(double t)> ghosts;
};

struct StepOptions {
  bool second_order = false;
  StepHooks hooks;
};

/// Scratch buffers reused across steps.
struct StepWorkspace {
  std::vector<double> u, flux_rho, flux_m, theta;
  std::vector<double> w_center, w_face;
  std::vector<double> rho1, m1, k_rho, k_m;
  double cached_r_min = -1.0, cached_h = -1.0;
  int cached_alpha = -1;
};

/// Largest stable time step: cfl * min(h / max(|u|+c), h^2 rho_min / (2 nu)).
double cfl_dt(const FluidState& state, const Eos& eos, const BoundaryData& bdata,
              double cfl);

struct ProfileOnCenters;  // defined in steady.hpp

/// Initial state from the resampled steady profile, optionally with the
/// configured density perturbation (momentum kept at the steady value).
FluidState make_initial_state(const RunConfig& cfg, const Eos& eos,
                              const ProfileOnCenters& steady);

/// One SSP-RK2 step of the w-weighted Rusanov scheme with geometric pressure
/// source and centered viscous differences. Density clamps are counted on the
/// state; non-finite values abort with NonFiniteState.
void step(FluidState& state, const Eos& eos, const BoundaryData& bdata, double dt,
          const StepOptions& opts, StepWorkspace& ws);

/// Centered second-order residuals of the reduced equations for a smooth
/// state (verification helper, not used during time stepping).
struct EvolveResiduals {
  double continuity = 0.0;
  double momentum = 0.0;
};
EvolveResiduals reduced_equations_residual(const FluidState& state, const Eos& eos,
                                           const BoundaryData& bdata);

/// Per-cell spatial residuals on interior cells (index 1 .. n-2); cells 0 and
/// n-1 carry zeros. Used by the manufactured-solution source cross-check.
void reduced_equations_residual_fields(const FluidState& state, const Eos& eos,
                                       const BoundaryData& bdata,
                                       std::vector<double>& continuity,
                                       std::vector<double>& momentum);

struct RunStats {
  std::size_t n_steps = 0;
  long clamp_events = 0;
};

/// Advance an initial state to t_end, invoking on_sample at t = 0, every
/// sample_dt, and at t_end (steps land exactly on those times), and
/// on_snapshot at each configured snapshot time.
RunStats advance(FluidState& state, const Eos& eos, const BoundaryData& bdata,
                 const RunConfig& cfg, const std::function<void(const FluidState&)>& on_sample,
                 const StepOptions& opts = {},
                 const std::function<void(const FluidState&)>& on_snapshot = {});

/// Observed L1 convergence order of the scheme on a smooth manufactured
/// solution with analytic sources, over a 4-level refinement.
struct MmsResult {
  std::vector<std::size_t> cells;
  std::vector<double> errors;
  double observed_order = 0.0;
};
MmsResult mms_convergence(const Eos& eos, const Geometry& geometry, bool second_order,
                          std::size_t base_cells = 64, int levels = 4);

}  // namespace barostab
