#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/mdp/solver.h"
#include "stapu/product/product.h"

namespace stapu::team {

using mdp::ActionId;
using mdp::StateId;

inline constexpr const char* kSwitchAction = "zeta";

struct TeamOptions {
  /// Adds a switch from the last robot in the ring back to the first. The
  /// first robot then restarts from its entry state, which it may no longer
  /// occupy when executing, so the resulting value can be optimistic.
  bool close_ring = false;
};

/// (robot index, state of that robot's local product).
struct TeamState {
  int robot;
  StateId local;
};

/// Sequential team model: each robot's local product in turn, linked by the
/// switch action. Only states reachable from the team initial state are
/// built.
class TeamMdp {
 public:
  const mdp::Mdp& model() const noexcept { return model_; }
  int num_robots() const noexcept { return static_cast<int>(products_.size()); }
  const product::ProductMdp& product(int robot) const { return products_.at(robot); }

  /// Robots in switching order; order()[0] owns the team initial state.
  const std::vector<int>& order() const noexcept { return order_; }
  /// Ring successor of `robot`, if it has one.
  std::optional<int> successor(int robot) const;
  /// Map state each robot starts its segment from.
  StateId entry(int robot) const { return entries_.at(robot); }
  /// Shared DFA vector at the team initial state.
  const std::vector<int>& initial_q() const noexcept { return q0_; }

  const TeamState& state(StateId id) const { return states_.at(id); }
  std::optional<StateId> find(int robot, StateId local) const;
  const product::ProductState& product_state(StateId id) const;

  ActionId switch_action() const noexcept { return zeta_; }
  /// Team action id for a robot's local action, and back.
  ActionId team_action(int robot, ActionId local) const { return to_team_.at(robot).at(local); }
  /// kNoAction when the robot has no such action.
  ActionId local_action(int robot, ActionId team) const { return to_local_.at(robot).at(team); }

  const mdp::StateSet& target() const noexcept { return target_; }
  const mdp::StateSet& avoid() const noexcept { return avoid_; }

  /// Σ_i of the local products' combinatorial sizes.
  double full_size(bool include_safety = true) const;

 private:
  friend TeamMdp build_team(std::vector<product::ProductMdp>, std::vector<StateId>,
                            std::vector<int>, std::vector<int>, const TeamOptions&);
  StateId intern(int robot, StateId local);

  std::vector<product::ProductMdp> products_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<StateId> entries_;
  std::vector<int> q0_;
  bool closed_ = false;
  mdp::Mdp model_;
  std::vector<TeamState> states_;
  std::map<std::pair<int, StateId>, StateId> index_;
  ActionId zeta_ = 0;
  std::vector<std::vector<ActionId>> to_team_;
  std::vector<std::vector<ActionId>> to_local_;
  mdp::StateSet target_, avoid_;
};

/// General form: robots switch in `order`, robot j starts from map state
/// entries[j] and the first robot starts with DFA vector `q0`.
///
/// The switch action is enabled at a state of robot i when robot i has a
/// ring successor, every task component is initial, accepting or unchanged
/// since the team start, and robot i is not in its failure state (unless
/// that is where it entered). It has probability 1 and cost 0 and keeps the
/// DFA vector.
TeamMdp build_team(std::vector<product::ProductMdp> products, std::vector<StateId> entries,
                   std::vector<int> q0, std::vector<int> order, const TeamOptions& opts = {});

/// Initial problem: robots in index order from their initial states, with
/// the DFAs advanced on the union of all starting labels.
TeamMdp build_team(std::vector<product::ProductMdp> products, const TeamOptions& opts = {});

/// Part of the team policy executed by one robot.
struct Segment {
  int robot;
  /// Team state where the robot takes over, if reached under the policy.
  std::optional<StateId> entry;
  /// Reachable robot states and the action chosen there, BFS order.
  std::vector<std::pair<StateId, ActionId>> choices;
};

struct StapuSolution {
  std::shared_ptr<const TeamMdp> team;
  double value = 0.0;
  std::vector<double> values;
  std::vector<double> costs;
  mdp::Policy policy;
  /// Robot per task; nullopt when the task is never completed under the
  /// policy.
  std::vector<std::optional<int>> allocation;
  std::vector<Segment> segments;
  /// Number of reachable states where each robot chooses the switch.
  std::vector<int> switches;

  nlohmann::json to_json() const;
};

struct SolveStapuOptions {
  mdp::SolveOptions vi;
  /// Use nested value iteration when the models carry costs.
  bool minimise_cost = true;
};

StapuSolution solve_stapu(std::shared_ptr<const TeamMdp> g, const SolveStapuOptions& opts = {});
StapuSolution solve_stapu(TeamMdp g, const SolveStapuOptions& opts = {});

/// Every action is deterministic or splits between one successor and the
/// designated failure state.
bool check_class(const mdp::Mdp& m);

/// At most one reachable switch state per robot under the solution policy.
bool check_single_switch(const StapuSolution& sol);

}  // namespace stapu::team
