#pragma once

#include <functional>

#include "barostab/config.hpp"
#include "barostab/relenergy.hpp"

namespace barostab {

/// Steady solve dispatched on the configured geometry.
SteadyProfile solve_steady(const Config& cfg, const Eos& eos);

struct Trajectory {
  SteadyProfile profile;
  std::vector<RelEnergySample> samples;
  FluidState final_state;
  RunStats stats;
  DecayReport report;
  double transient_time = 0.0;
};

/// Full scenario: steady solve, initial state, time integration with the
/// inequality ledger sampled every sample_dt, finalized decay report.
Trajectory run_scenario(const Config& cfg,
                        const std::function<void(const FluidState&)>& on_snapshot = {});

/// Transient window: configured value, or 2 (domain length)/(inflow speed).
double default_transient_time(const RunConfig& cfg);

}  // namespace barostab
