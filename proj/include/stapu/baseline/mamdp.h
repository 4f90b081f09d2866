#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/mission.h"
#include "stapu/mdp/solver.h"

namespace stapu::baseline {

using mdp::StateId;

/// Synchronous joint model of every robot and the mission DFAs. A state is
/// (s_1..s_n, q_1..q_k); a joint action picks one enabled action or idle for
/// each robot. Only states reachable from the joint start are built.
struct MamdpModel {
  int num_robots = 0;
  std::shared_ptr<const logic::CompiledMission> mission;
  mdp::Mdp model;
  /// Per state: robot positions then DFA components.
  std::vector<std::vector<int>> tuples;
  mdp::StateSet accepting;
  mdp::StateSet violated;
  /// Π|S_i| (operational states) times Π|Q|.
  double full_size = 0.0;
};

inline constexpr double kDefaultCeiling = 1e7;

/// Throws CeilingExceeded when the full combinatorial size is above
/// `ceiling`, InputError on inconsistent inputs.
MamdpModel build_mamdp(const std::vector<mdp::Mdp>& models, const logic::Mission& mission,
                       double ceiling = kDefaultCeiling);

/// Combinatorial size without building anything.
double mamdp_full_size(const std::vector<mdp::Mdp>& models, const logic::CompiledMission& mission);

struct MamdpSolution {
  double value = 0.0;
  mdp::Policy policy;
  int iterations = 0;
};

MamdpSolution solve_mamdp(const MamdpModel& mm, const mdp::SolveOptions& opts = {});

}  // namespace stapu::baseline
