#pragma once

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/team/team.h"

namespace stapu::realloc {

using mdp::ActionId;
using mdp::StateId;

enum class RobotStatus : std::uint8_t { kExecuting, kDone, kFailed };

/// Synchronised state of every robot plus the shared DFA vector. `plan`
/// names the team solution the robots are following; `local` is each
/// robot's state in that plan's local product (its own view of progress),
/// or -1 when the robot has no segment in the plan.
struct JointState {
  int plan = 0;
  std::vector<StateId> s;
  std::vector<StateId> local;
  std::vector<RobotStatus> status;
  std::vector<int> q;
  /// Lowest robot that entered its failure state on the step into this
  /// state, -1 if none did.
  int newly_failed = -1;

  auto operator<=>(const JointState&) const = default;
  bool operator==(const JointState&) const = default;
};

enum class NodeKind : std::uint8_t {
  kTransient,
  kSuccess,
  kFailure,
  /// Reallocation point not (yet) addressed; absorbing.
  kPending,
  /// Reallocation point with a grafted continuation.
  kGrafted,
};

const char* to_string(NodeKind k);

inline constexpr ActionId kIdle = -1;

struct JointNode {
  JointState state;
  NodeKind kind = NodeKind::kTransient;
  /// Local action per robot, kIdle for robots not moving.
  std::vector<ActionId> actions;
  std::vector<std::pair<int, double>> succ;
};

/// Markov chain of the team executing plans in lockstep. Plans are added
/// when reallocation points are grafted; every plan gets fresh nodes, so the
/// continuation below a grafted point is a separate sub-chain.
class JointPolicy {
 public:
  int num_robots() const noexcept { return robots_; }
  int initial() const noexcept { return initial_; }
  const std::vector<JointNode>& nodes() const noexcept { return nodes_; }
  const JointNode& node(int i) const { return nodes_.at(i); }
  int num_plans() const noexcept { return static_cast<int>(plans_.size()); }
  /// Empty when loaded from JSON.
  const team::StapuSolution& plan(int id) const { return *plans_.at(id); }
  /// Root node of each plan.
  int plan_root(int id) const { return roots_.at(id); }

  nlohmann::json to_json() const;
  /// Loads the chain only (nodes, kinds, successors); plans are not
  /// restored.
  static JointPolicy from_json(const nlohmann::json& j);

 private:
  friend class ChainBuilder;
  int robots_ = 0;
  int initial_ = 0;
  std::vector<JointNode> nodes_;
  std::map<JointState, int> index_;
  std::vector<std::shared_ptr<const team::StapuSolution>> plans_;
  std::vector<int> roots_;
  std::vector<std::string> plan_summaries_;
  std::vector<std::vector<std::string>> action_names_;
};

struct SyncOptions {
  /// Refuse models outside the deterministic-or-fail class and policies
  /// with more than one switch per robot.
  bool require_class = true;
};

/// Joint chain of the initial plan.
JointPolicy synchronize(const team::StapuSolution& sol, const SyncOptions& opts = {});

/// Adds `sol` as a new plan continuing from pending node `node`; returns
/// the new plan's root node.
int graft(JointPolicy& jp, int node, const team::StapuSolution& sol,
          const SyncOptions& opts = {});

/// Probability mass absorbed in each absorbing node when `mass` starts in
/// `root`, restricted to the sub-chain reachable from it.
std::map<int, double> propagate(const JointPolicy& jp, int root, double mass = 1.0);

struct ReallocPoint {
  int node;
  int robot;
  double probability;
  bool addressed = false;
};

/// Pending points with their probability from the initial node, highest
/// first; ties keep discovery order.
std::vector<ReallocPoint> find_realloc_points(const JointPolicy& jp);

}  // namespace stapu::realloc
