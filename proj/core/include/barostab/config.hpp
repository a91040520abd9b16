#pragma once

#include <string>
#include <vector>

#include "barostab/evolve.hpp"
#include "barostab/steady.hpp"

namespace barostab {

struct SweepSpec {
  std::string parameter;  // u_B_plus_minus_gap | u_B | amplitude
  std::vector<double> values;
};

/// Parsed run configuration: the JSON blocks eos / geometry / boundary /
/// solver / run / initial, plus the sweep and compare sections.
struct Config {
  std::string name;
  RunConfig run;
  SolverOptions solver;
  SweepSpec sweep;
  std::vector<double> compare_r_list;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

/// Round-trip serialization (used by the sweep to derive per-row configs and
/// by tests).
std::string config_to_json(const Config& cfg);

}  // namespace barostab
