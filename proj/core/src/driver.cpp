#include "barostab/driver.hpp"

#include <algorithm>
#include <cmath>

#include "barostab/csv.hpp"

namespace barostab {

SteadyProfile solve_steady(const Config& cfg, const Eos& eos) {
  switch (cfg.run.geometry.kind) {
    case GeometryKind::Strip:
      return solve_strip_steady(eos, cfg.run.boundary, cfg.solver);
    case GeometryKind::Annulus:
      return solve_annulus_steady(eos, cfg.run.boundary, cfg.run.geometry, cfg.solver);
    case GeometryKind::Exterior:
      return solve_exterior_steady(eos, cfg.run.boundary, cfg.run.geometry, cfg.solver);
  }
  fail(ErrorCode::ConfigError, "unknown geometry");
}

double default_transient_time(const RunConfig& cfg) {
  if (cfg.transient_time > 0.0) return cfg.transient_time;
  const double length = cfg.geometry.outer() - cfg.geometry.inner();
  const double u_in = cfg.geometry.kind == GeometryKind::Exterior ? cfg.boundary.u_B
                                                                  : cfg.boundary.u_B_minus;
  return 2.0 * length / u_in;
}

namespace {

FluidState custom_initial_state(const RunConfig& cfg) {
  const CsvTable table = read_csv(cfg.initial.path);
  const int cr = table.column("r");
  const int crho = table.column("rho");
  const int cu = table.column("u");
  if (cr < 0 || crho < 0 || cu < 0 || table.rows.size() < 2) {
    fail(ErrorCode::ConfigError, "custom initial state needs columns r, rho, u");
  }
  FluidState s;
  s.geometry = cfg.geometry;
  s.r_min = cfg.geometry.inner();
  s.h = (cfg.geometry.outer() - cfg.geometry.inner()) / static_cast<double>(cfg.n_cells);
  s.rho.resize(cfg.n_cells);
  s.m.resize(cfg.n_cells);
  // linear interpolation onto cell centers
  std::size_t j = 0;
  for (std::size_t i = 0; i < cfg.n_cells; ++i) {
    const double r = s.center(i);
    while (j + 2 < table.rows.size() && table.rows[j + 1][cr] < r) ++j;
    const double r0 = table.rows[j][cr];
    const double r1 = table.rows[j + 1][cr];
    const double t = std::clamp((r - r0) / (r1 - r0), 0.0, 1.0);
    const double rho = (1.0 - t) * table.rows[j][crho] + t * table.rows[j + 1][crho];
    const double u = (1.0 - t) * table.rows[j][cu] + t * table.rows[j + 1][cu];
    s.rho[i] = rho;
    s.m[i] = rho * u;
  }
  return s;
}

}  // namespace

Trajectory run_scenario(const Config& cfg,
                        const std::function<void(const FluidState&)>& on_snapshot) {
  cfg.run.validate();
  const Eos eos(cfg.run.eos);
  cfg.run.boundary.validate(cfg.run.geometry.kind, eos.rho_bar());

  Trajectory traj;
  traj.profile = solve_steady(cfg, eos);
  traj.transient_time = default_transient_time(cfg.run);

  const double lo = cfg.run.geometry.inner();
  const double hi = cfg.run.geometry.outer();
  const double h = (hi - lo) / static_cast<double>(cfg.run.n_cells);
  const ProfileOnCenters centers = resample_to_centers(traj.profile, lo, h, cfg.run.n_cells);

  FluidState state = cfg.run.initial.kind == InitialKind::Custom
                         ? custom_initial_state(cfg.run)
                         : make_initial_state(cfg.run, eos, centers);

  StepOptions opts;
  opts.second_order = cfg.run.second_order;

  traj.samples.reserve(static_cast<std::size_t>(cfg.run.t_end / cfg.run.sample_dt) + 2);
  traj.stats = advance(
      state, eos, cfg.run.boundary, cfg.run,
      [&](const FluidState& s) { traj.samples.push_back(inequality_ledger(s, centers, eos, cfg.run.boundary)); },
      opts, on_snapshot);

  finalize_ledger(traj.samples);
  traj.report = decay_report(traj.samples, traj.transient_time);
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace barostab
