#pragma once

#include <functional>
#include <vector>

#include "stapu/mdp/mdp.h"

namespace stapu::mdp {

inline constexpr ActionId kNoAction = -1;

/// Memoryless policy: one action id per state, kNoAction where no decision
/// is needed (absorbing, or no enabled action).
using Policy = std::vector<ActionId>;

struct SolveOptions {
  double epsilon = 1e-6;
  int max_iterations = 100000;
  /// Called after every sweep with the iteration number (1-based) and the
  /// current value vector.
  std::function<void(int, const std::vector<double>&)> on_iteration;
};

struct ReachResult {
  std::vector<double> value;
  Policy policy;
  int iterations = 0;
};

struct NestedResult {
  std::vector<double> prob;
  std::vector<double> cost;
  Policy policy;
  int iterations = 0;
};

/// States whose maximal probability of reaching `target` while avoiding
/// `avoid` is exactly 0.
StateSet prob0(const Mdp& m, const StateSet& target, const StateSet& avoid);
/// States from which some policy reaches `target` almost surely.
StateSet prob1e(const Mdp& m, const StateSet& target, const StateSet& avoid);

/// Maximal reachability probabilities by Gauss-Seidel value iteration after
/// prob0/prob1 precomputation. The returned policy is proper: from every
/// state with positive value it reaches `target` with the computed
/// probability rather than idling in an end component.
/// Throws SolverError when the iteration cap is hit.
ReachResult max_reach(const Mdp& m, const StateSet& target, const StateSet& avoid,
                      const SolveOptions& opts = {});

/// Maximal reachability, then minimal expected cost until absorption over
/// the actions that stay optimal for probability. Zero-probability states
/// get cost 0.
NestedResult nested_vi(const Mdp& m, const StateSet& target, const StateSet& avoid,
                       const SolveOptions& opts = {});

/// Probability of reaching `target` (avoiding `avoid`) under a fixed policy.
std::vector<double> policy_reach(const Mdp& m, const Policy& pi, const StateSet& target,
                                 const StateSet& avoid, const SolveOptions& opts = {});

/// Probability-weighted Q value of one choice.
double q_value(const Choice& c, const std::vector<double>& v);

}  // namespace stapu::mdp
