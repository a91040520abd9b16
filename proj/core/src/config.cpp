#include "barostab/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace barostab {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(ErrorCode::ConfigError, std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

EosSpec parse_eos(const json& j) {
  EosSpec spec;
  const std::string kind = j.value("kind", "isentropic");
  if (kind == "isentropic") {
    spec.kind = EosKind::Isentropic;
  } else if (kind == "hard_sphere") {
    spec.kind = EosKind::HardSphere;
  } else {
    fail(ErrorCode::ConfigError, "eos.kind must be isentropic or hard_sphere");
  }
  spec.a = get_num(j, "a", 1.0);
  spec.gamma = get_num(j, "gamma", 2.0);
  spec.beta = get_num(j, "beta", 1.0);
  spec.rho_bar = get_num(j, "rho_bar", std::numeric_limits<double>::infinity());
  spec.rho_ref = get_num(j, "rho_ref", std::numeric_limits<double>::quiet_NaN());
  return spec;
}

Geometry parse_geometry(const json& j) {
  const std::string kind = j.value("kind", "strip");
  if (kind == "strip") return Geometry::strip();
  if (kind == "annulus") {
    return Geometry::annulus(get_num(j, "r_minus", 1.0), get_num(j, "r_plus", 2.0));
  }
  if (kind == "exterior") {
    return Geometry::exterior(get_num(j, "r_bar", 1.0), get_num(j, "r_trunc", 100.0));
  }
  fail(ErrorCode::ConfigError, "geometry.kind must be strip, annulus or exterior");
}

BoundaryData parse_boundary(const json& j) {
  BoundaryData b;
  b.rho_B = get_num(j, "rho_B", b.rho_B);
  b.u_B_minus = get_num(j, "u_B_minus", b.u_B_minus);
  b.u_B_plus = get_num(j, "u_B_plus", b.u_B_plus);
  b.u_B = get_num(j, "u_B", b.u_B);
  b.rho_inf = get_num(j, "rho_inf", b.rho_inf);
  b.mu = get_num(j, "mu", b.mu);
  b.lambda = get_num(j, "lambda", b.lambda);
  return b;
}

InitialCondition parse_initial(const json& j) {
  InitialCondition ic;
  const std::string type = j.value("type", "steady");
  if (type == "steady") {
    ic.kind = InitialKind::Steady;
  } else if (type == "perturbed") {
    ic.kind = InitialKind::Perturbed;
  } else if (type == "custom") {
    ic.kind = InitialKind::Custom;
  } else {
    fail(ErrorCode::ConfigError, "initial.type must be steady, perturbed or custom");
  }
  ic.amplitude = get_num(j, "amplitude", 0.0);
  ic.mode = get_num(j, "mode", 1.0);
  ic.path = j.value("path", "");
  if (j.contains("support")) {
    const auto& s = j.at("support");
    if (!s.is_array() || s.size() != 2) {
      fail(ErrorCode::ConfigError, "initial.support must be [lo, hi]");
    }
    ic.support = std::make_pair(s[0].get<double>(), s[1].get<double>());
  }
  return ic;
}

}  // namespace

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }

  Config cfg;
  cfg.name = j.value("name", "");
  if (j.contains("eos")) cfg.run.eos = parse_eos(j.at("eos"));
  if (j.contains("geometry")) cfg.run.geometry = parse_geometry(j.at("geometry"));
  if (j.contains("boundary")) cfg.run.boundary = parse_boundary(j.at("boundary"));
  if (j.contains("initial")) cfg.run.initial = parse_initial(j.at("initial"));

  if (j.contains("run")) {
    const auto& r = j.at("run");
    cfg.run.n_cells = static_cast<std::size_t>(get_num(r, "n_cells", 1024));
    cfg.run.cfl = get_num(r, "cfl", 0.45);
    cfg.run.t_end = get_num(r, "t_end", 1.0);
    cfg.run.sample_dt = get_num(r, "sample_dt", 0.1);
    cfg.run.second_order = r.value("second_order", false);
    cfg.run.transient_time = get_num(r, "transient_time", 0.0);
    cfg.run.wall_clock_budget_s = get_num(r, "wall_clock_budget_s", 0.0);
    cfg.run.seed = static_cast<unsigned long>(get_num(r, "seed", 0.0));
    if (r.contains("snapshot_times")) {
      for (const auto& t : r.at("snapshot_times")) {
        cfg.run.snapshot_times.push_back(t.get<double>());
      }
    }
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.solver.tol = get_num(s, "tol", 1e-10);
    cfg.solver.n_cells = static_cast<std::size_t>(get_num(s, "n_cells", 4096));
    cfg.solver.check_truncation = s.value("check_truncation", true);
    if (s.contains("r_trunc")) cfg.run.geometry.r_trunc = get_num(s, "r_trunc", 100.0);
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    cfg.sweep.parameter = s.value("parameter", "");
    if (s.contains("values")) {
      for (const auto& v : s.at("values")) cfg.sweep.values.push_back(v.get<double>());
    }
  }

  if (j.contains("compare")) {
    const auto& c = j.at("compare");
    if (c.contains("r_list")) {
      for (const auto& v : c.at("r_list")) cfg.compare_r_list.push_back(v.get<double>());
    }
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const Config& cfg) {
  json j;
  if (!cfg.name.empty()) j["name"] = cfg.name;

  json eos;
  eos["kind"] = cfg.run.eos.kind == EosKind::Isentropic ? "isentropic" : "hard_sphere";
  eos["a"] = cfg.run.eos.a;
  if (cfg.run.eos.kind == EosKind::Isentropic) {
    eos["gamma"] = cfg.run.eos.gamma;
  } else {
    eos["beta"] = cfg.run.eos.beta;
    eos["rho_bar"] = cfg.run.eos.rho_bar;
  }
  j["eos"] = eos;

  json geo;
  switch (cfg.run.geometry.kind) {
    case GeometryKind::Strip: geo["kind"] = "strip"; break;
    case GeometryKind::Annulus:
      geo["kind"] = "annulus";
      geo["r_minus"] = cfg.run.geometry.r_minus;
      geo["r_plus"] = cfg.run.geometry.r_plus;
      break;
    case GeometryKind::Exterior:
      geo["kind"] = "exterior";
      geo["r_bar"] = cfg.run.geometry.r_bar;
      geo["r_trunc"] = cfg.run.geometry.r_trunc;
      break;
  }
  j["geometry"] = geo;

  json b;
  b["rho_B"] = cfg.run.boundary.rho_B;
  b["u_B_minus"] = cfg.run.boundary.u_B_minus;
  b["u_B_plus"] = cfg.run.boundary.u_B_plus;
  b["u_B"] = cfg.run.boundary.u_B;
  b["rho_inf"] = cfg.run.boundary.rho_inf;
  b["mu"] = cfg.run.boundary.mu;
  b["lambda"] = cfg.run.boundary.lambda;
  j["boundary"] = b;

  json r;
  r["n_cells"] = cfg.run.n_cells;
  r["cfl"] = cfg.run.cfl;
  r["t_end"] = cfg.run.t_end;
  r["sample_dt"] = cfg.run.sample_dt;
  r["second_order"] = cfg.run.second_order;
  r["transient_time"] = cfg.run.transient_time;
  r["wall_clock_budget_s"] = cfg.run.wall_clock_budget_s;
  r["seed"] = cfg.run.seed;
  if (!cfg.run.snapshot_times.empty()) r["snapshot_times"] = cfg.run.snapshot_times;
  j["run"] = r;

  json ic;
  switch (cfg.run.initial.kind) {
    case InitialKind::Steady: ic["type"] = "steady"; break;
    case InitialKind::Perturbed: ic["type"] = "perturbed"; break;
    case InitialKind::Custom: ic["type"] = "custom"; break;
  }
  ic["amplitude"] = cfg.run.initial.amplitude;
  ic["mode"] = cfg.run.initial.mode;
  if (!cfg.run.initial.path.empty()) ic["path"] = cfg.run.initial.path;
  if (cfg.run.initial.support) {
    ic["support"] = {cfg.run.initial.support->first, cfg.run.initial.support->second};
  }
  j["initial"] = ic;

  json s;
  s["tol"] = cfg.solver.tol;
  s["n_cells"] = cfg.solver.n_cells;
  s["check_truncation"] = cfg.solver.check_truncation;
  j["solver"] = s;

  if (!cfg.sweep.parameter.empty()) {
    j["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", cfg.sweep.values}};
  }
  if (!cfg.compare_r_list.empty()) {
    j["compare"] = {{"r_list", cfg.compare_r_list}};
  }
  return j.dump(2);
}

}  // namespace barostab
