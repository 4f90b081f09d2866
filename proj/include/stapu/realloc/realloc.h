#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/mission.h"
#include "stapu/realloc/joint.h"

namespace stapu::realloc {

/// Team problem at a reallocation point: the failed robot first (in its
/// failure state, with the shared DFA vector), the others from their current
/// states in ring order after it.
team::StapuSolution solve_realloc(ReallocPoint& point, const JointPolicy& jp,
                                  std::vector<product::ProductMdp> products,
                                  const team::SolveStapuOptions& opts = {},
                                  const team::TeamOptions& team_opts = {});

struct IterationLog {
  int iteration = 0;
  int node = 0;
  int robot = 0;
  double point_probability = 0.0;
  /// Value of the team problem solved at the point.
  double realloc_value = 0.0;
  double success = 0.0;
  double failure = 0.0;
  double unaddressed = 0.0;
  double elapsed_ms = 0.0;
};

struct GuaranteeReport {
  double initial_value = 0.0;
  double success = 0.0;
  double failure = 0.0;
  /// Mass still sitting in pending reallocation points.
  double unaddressed = 0.0;
  int reallocations = 0;
  int pending_points = 0;
  /// Largest |success + failure + unaddressed - 1| seen over the loop.
  double max_conservation_error = 0.0;
  double initial_solve_ms = 0.0;
  double total_ms = 0.0;
  std::size_t team_states = 0;
  std::size_t team_transitions = 0;
  double team_full_size = 0.0;
  std::vector<IterationLog> log;

  nlohmann::json to_json() const;
};

struct ReallocOptions {
  /// Negative for no limit.
  int max_reallocations = -1;
  /// Wall-clock budget for the loop in seconds.
  std::optional<double> time_budget_s;
  team::SolveStapuOptions solve;
  team::TeamOptions team;
  SyncOptions sync;
  std::function<void(const IterationLog&)> on_iteration;
};

struct ReallocResult {
  JointPolicy policy;
  GuaranteeReport report;
  team::StapuSolution initial;
};

/// Initial team solve, synchronisation, then reallocation points in
/// decreasing probability order until none remain or the budget runs out.
/// Pending points count as failures in the reported success probability.
ReallocResult run_stapu_with_realloc(const std::vector<mdp::Mdp>& models,
                                     const logic::Mission& mission,
                                     const ReallocOptions& opts = {});

}  // namespace stapu::realloc
