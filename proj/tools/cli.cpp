#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "barostab/csv.hpp"
#include "barostab/driver.hpp"

namespace barostab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  unsigned threads = 0;
  unsigned long seed = 0;
  bool seed_set = false;
};

fs::path prepare_out_dir(const GlobalOpts& g) {
  std::string dir = g.out_dir;
  if (const char* env = std::getenv("BAROSTAB_OUT"); env && *env) dir = env;
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + p.string());
  return p;
}

Config load_config(const GlobalOpts& g) {
  if (g.config_path.empty()) fail(ErrorCode::ConfigError, "--config is required");
  Config cfg = parse_config_file(g.config_path);
  if (g.seed_set) cfg.run.seed = g.seed;
  return cfg;
}

json report_to_json(const DecayReport& r) {
  json j;
  j["n_samples"] = r.n_samples;
  j["transient_time"] = r.transient_time;
  j["initial_E"] = r.initial_E;
  j["post_transient_E"] = r.post_transient_E;
  j["final_E"] = r.final_E;
  j["final_over_post_transient"] = r.final_over_post_transient;
  j["largest_uptick"] = r.largest_uptick;
  j["uptick_tolerance"] = r.uptick_tolerance;
  j["fitted_decay_rate"] = r.fitted_decay_rate;
  j["dissipation_time_integral"] = r.dissipation_time_integral;
  j["c9c_cumulative"] = r.c9c_cumulative;
  j["c9d_cumulative"] = r.c9d_cumulative;
  j["c9d_tail_fraction"] = r.c9d_tail_fraction;
  j["monotone_pass"] = r.monotone_pass;
  j["pass"] = r.pass;
  return j;
}

void write_profile_csv(const fs::path& path, const SteadyProfile& p, const Eos& eos) {
  std::vector<double> rc, rm;
  steady_residual_fields(p, eos, rc, rm);
  CsvWriter csv(path.string(),
                {"r", "rho_tilde", "u_tilde", "du_tilde", "div_u", "residual_c", "residual_m"});
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double row[7] = {p.grid[i], p.rho_tilde[i], p.u_tilde[i], p.du_tilde[i],
                           p.div_u[i], rc[i],          rm[i]};
    csv.row(row);
  }
  csv.close();
}

double mass_flux_max_rel_dev(const SteadyProfile& p) {
  double dev = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double w = p.geometry.alpha == 0 ? 1.0 : p.grid[i] * p.grid[i];
    const double flux = w * p.rho_tilde[i] * p.u_tilde[i];
    dev = std::max(dev, std::abs(flux - p.mass_flux) / std::abs(p.mass_flux));
  }
  return dev;
}

json steady_checks(const SteadyProfile& p, const Eos& eos) {
  json checks;
  const double flux_dev = mass_flux_max_rel_dev(p);
  checks["mass_flux_max_rel_dev"] = flux_dev;
  checks["mass_flux_constant"] = flux_dev <= 1e-10;

  bool density_ok = true;
  for (double rho : p.rho_tilde) density_ok &= (rho > 0.0 && rho < eos.rho_bar());
  checks["density_in_range"] = density_ok;

  if (p.geometry.kind == GeometryKind::Exterior) {
    bool u_neg = true, du_pos = true, div_pos = true, deficit_pos = true, drho_pos = true;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      u_neg &= p.u_tilde[i] < 0.0;
      du_pos &= p.du_tilde[i] > 0.0;
      div_pos &= p.div_u[i] > 0.0;
      deficit_pos &= p.rho_deficit[i] > 0.0;
      if (i > 0) drho_pos &= p.rho_deficit[i] < p.rho_deficit[i - 1];
    }
    checks["u_negative"] = u_neg;
    checks["du_positive"] = du_pos;
    checks["div_u_positive"] = div_pos;
    checks["rho_below_rho_inf"] = deficit_pos;
    checks["drho_positive"] = drho_pos;
  } else {
    bool u_pos = true;
    for (double u : p.u_tilde) u_pos &= u > 0.0;
    checks["u_positive"] = u_pos;
    if (p.boundary.u_B_plus > p.boundary.u_B_minus) {
      bool du_pos = true;
      for (double du : p.du_tilde) du_pos &= du > 0.0;
      checks["du_positive"] = du_pos;
    }
  }
  return checks;
}

int cmd_steady(const GlobalOpts& g) {
  const Config cfg = load_config(g);
  const fs::path out = prepare_out_dir(g);
  const Eos eos(cfg.run.eos);
  cfg.run.boundary.validate(cfg.run.geometry.kind, eos.rho_bar());
  const SteadyProfile p = solve_steady(cfg, eos);

  write_profile_csv(out / "profile.csv", p, eos);

  json j;
  j["name"] = cfg.name;
  j["Lambda"] = p.Lambda;
  j["mass_flux"] = p.mass_flux;
  j["residual_continuity"] = p.residual_continuity;
  j["residual_momentum"] = p.residual_momentum;
  j["nonmonotone_shooting"] = p.nonmonotone_shooting;
  j["truncation_warning"] = p.truncation_warning;
  j["checks"] = steady_checks(p, eos);
  if (p.geometry.kind == GeometryKind::Exterior) {
    const ExteriorDecayFits fits = fit_exterior_decay(p);
    j["fits"] = {{"slope_deficit", fits.slope_deficit},
                 {"slope_u", fits.slope_u},
                 {"slope_du", fits.slope_du}};
  }
  bool pass = true;
  for (const auto& [key, value] : j["checks"].items()) {
    if (value.is_boolean()) pass &= value.get<bool>();
  }
  j["pass"] = pass;
  write_file_atomic((out / "steady_report.json").string(), j.dump(2) + "\n");
  std::cout << (pass ? "PASS " : "FAIL ") << "steady checks -> "
            << (out / "steady_report.json").string() << "\n";
  return pass ? 0 : 2;
}

void write_trajectory_csv(const fs::path& path, const std::vector<RelEnergySample>& samples) {
  CsvWriter csv(path.string(), {"t", "E", "D", "B_in", "B_out", "T_grad", "T_press", "T_rem",
                                "lhs_minus_rhs", "monotone_flag"});
  for (const auto& s : samples) {
    const double row[10] = {s.t,      s.E,      s.D,     s.B_in,
                            s.B_out,  s.T_grad, s.T_press, s.T_rem,
                            s.lhs_minus_rhs, s.monotone_flag ? 1.0 : 0.0};
    csv.row(row);
  }
  csv.close();
}

void write_snapshot_csv(const fs::path& out, const FluidState& s) {
  char name[64];
  std::snprintf(name, sizeof(name), "state_t%.6g.csv", s.t);
  CsvWriter csv((out / name).string(), {"r", "rho", "u"});
  for (std::size_t i = 0; i < s.n_cells(); ++i) {
    const double row[3] = {s.center(i), s.rho[i], s.m[i] / s.rho[i]};
    csv.row(row);
  }
  csv.close();
}

int cmd_evolve(const GlobalOpts& g) {
  const Config cfg = load_config(g);
  const fs::path out = prepare_out_dir(g);
  const Trajectory traj =
      run_scenario(cfg, [&](const FluidState& s) { write_snapshot_csv(out, s); });

  write_trajectory_csv(out / "trajectory.csv", traj.samples);
  json j = report_to_json(traj.report);
  j["name"] = cfg.name;
  j["n_steps"] = traj.stats.n_steps;
  j["clamp_events"] = traj.stats.clamp_events;
  write_file_atomic((out / "report.json").string(), j.dump(2) + "\n");
  std::cout << (traj.report.pass ? "PASS " : "FAIL ") << "decay report -> "
            << (out / "report.json").string() << "\n";
  return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& input, double transient) {
  const fs::path out = prepare_out_dir(g);
  const CsvTable table = read_csv(input);
  const int ct = table.column("t");
  const int ce = table.column("E");
  const int cd = table.column("D");
  if (ct < 0 || ce < 0 || cd < 0) {
    fail(ErrorCode::ConfigError, "trajectory csv needs columns t, E, D");
  }
  std::vector<RelEnergySample> samples;
  samples.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    RelEnergySample s;
    s.t = row[ct];
    s.E = row[ce];
    s.D = row[cd];
    const auto opt = [&](const char* name, double& field) {
      const int c = table.column(name);
      if (c >= 0) field = row[static_cast<std::size_t>(c)];
    };
    opt("B_in", s.B_in);
    opt("B_out", s.B_out);
    opt("T_grad", s.T_grad);
    opt("T_press", s.T_press);
    opt("T_rem", s.T_rem);
    opt("lhs_minus_rhs", s.lhs_minus_rhs);
    samples.push_back(s);
  }
  if (transient <= 0.0) {
    if (!g.config_path.empty()) {
      transient = default_transient_time(parse_config_file(g.config_path).run);
    } else if (!samples.empty()) {
      transient = samples.front().t + 0.1 * (samples.back().t - samples.front().t);
    }
  }
  const DecayReport rep = decay_report(samples, transient);
  write_file_atomic((out / "report.json").string(), report_to_json(rep).dump(2) + "\n");
  std::cout << (rep.pass ? "PASS " : "FAIL ") << "decay report -> "
            << (out / "report.json").string() << "\n";
  return 0;
}

struct SweepRow {
  double value = 0.0;
  int status = 0;  // 0 ok, 2 numerical failure
  DecayReport report;
};

Config apply_sweep_value(const Config& base, const std::string& parameter, double v) {
  Config cfg = base;
  if (parameter == "u_B_plus_minus_gap") {
    cfg.run.boundary.u_B_plus = cfg.run.boundary.u_B_minus + v;
  } else if (parameter == "u_B") {
    cfg.run.boundary.u_B = v;
  } else if (parameter == "amplitude") {
    cfg.run.initial.kind = InitialKind::Perturbed;
    cfg.run.initial.amplitude = v;
  } else {
    fail(ErrorCode::ConfigError,
         "sweep.parameter must be u_B_plus_minus_gap, u_B or amplitude");
  }
  return cfg;
}

int cmd_sweep(const GlobalOpts& g) {
  const Config base = load_config(g);
  if (base.sweep.parameter.empty() || base.sweep.values.empty()) {
    fail(ErrorCode::ConfigError, "sweep requires sweep.parameter and sweep.values");
  }
  const fs::path out = prepare_out_dir(g);

  std::vector<SweepRow> rows(base.sweep.values.size());
  const unsigned n_threads =
      g.threads > 0 ? g.threads : std::max(1u, std::thread::hardware_concurrency());

  std::size_t next = 0;
  std::mutex mtx;
  const auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= rows.size()) return;
        idx = next++;
      }
      SweepRow& row = rows[idx];
      row.value = base.sweep.values[idx];
      try {
        const Config cfg = apply_sweep_value(base, base.sweep.parameter, row.value);
        row.report = run_scenario(cfg).report;
        row.status = 0;
      } catch (const Error&) {
        row.status = 2;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  CsvWriter csv((out / "sweep.csv").string(),
                {"value", "status", "monotone_pass", "final_over_post_transient",
                 "largest_uptick", "fitted_decay_rate"});
  double empirical_delta = 0.0;
  bool first_pass = false;
  json jrows = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    const bool pass = row.status == 0 && row.report.monotone_pass;
    const double data[6] = {row.value,
                            static_cast<double>(row.status),
                            pass ? 1.0 : 0.0,
                            row.report.final_over_post_transient,
                            row.report.largest_uptick,
                            row.report.fitted_decay_rate};
    csv.row(data);
    if (pass) empirical_delta = std::max(empirical_delta, row.value);
    if (i == 0) first_pass = pass;
    json jr = report_to_json(row.report);
    jr["value"] = row.value;
    jr["status"] = row.status;
    jr["pass"] = pass;
    jrows.push_back(jr);
  }
  csv.close();
  json j;
  j["parameter"] = base.sweep.parameter;
  j["empirical_delta"] = empirical_delta;
  j["first_value_pass"] = first_pass;
  j["rows"] = jrows;
  write_file_atomic((out / "sweep_report.json").string(), j.dump(2) + "\n");
  std::cout << "sweep table -> " << (out / "sweep.csv").string()
            << " (empirical delta = " << empirical_delta << ")\n";
  return 0;
}

int cmd_compare(const GlobalOpts& g) {
  const Config cfg = load_config(g);
  const fs::path out = prepare_out_dir(g);
  const Eos eos(cfg.run.eos);
  std::vector<double> r_list = cfg.compare_r_list;
  if (r_list.empty()) r_list = {2.0, 4.0, 8.0, 16.0, 32.0};
  const auto table = flat_curved_comparison(eos, cfg.run.boundary, r_list, cfg.solver);

  CsvWriter csv((out / "compare.csv").string(), {"r", "dist_u", "dist_du", "dist_rho"});
  for (const auto& row : table) {
    const double data[4] = {row.r, row.dist_u, row.dist_du, row.dist_rho};
    csv.row(data);
  }
  csv.close();
  std::cout << "flat/curved table -> " << (out / "compare.csv").string() << "\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Radially symmetric steady states and relative-energy decay for the "
               "barotropic Navier-Stokes system"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON run configuration")->expected(1);
  app.add_option("--out", g.out_dir, "output directory (BAROSTAB_OUT overrides)");
  app.add_option("--threads", g.threads, "worker threads for sweeps");
  auto* seed_opt = app.add_option("--seed", g.seed, "perturbation phase seed");

  auto* steady = app.add_subcommand("steady", "solve a steady profile and verify its properties");
  auto* evolve = app.add_subcommand("evolve", "time integration with the relative-energy ledger");
  auto* verify = app.add_subcommand("verify", "decay report from a stored trajectory CSV");
  auto* sweep = app.add_subcommand("sweep", "threshold sweep over a boundary-data parameter");
  auto* compare = app.add_subcommand("compare", "flat vs curved steady profiles");

  std::string verify_input;
  double verify_transient = 0.0;
  verify->add_option("--input", verify_input, "trajectory CSV")->required();
  verify->add_option("--transient", verify_transient, "transient window override");

  std::vector<const char*> argv_store;
  std::vector<char*> argv;
  argv_store.push_back("barostab");
  for (const auto& a : args) argv_store.push_back(a.c_str());
  for (const char* p : argv_store) argv.push_back(const_cast<char*>(p));

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (steady->parsed()) return cmd_steady(g);
    if (evolve->parsed()) return cmd_evolve(g);
    if (verify->parsed()) return cmd_verify(g, verify_input, verify_transient);
    if (sweep->parsed()) return cmd_sweep(g);
    if (compare->parsed()) return cmd_compare(g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 3;
}

}  // namespace barostab::cli
