#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/mission.h"
#include "stapu/mdp/mdp.h"

namespace stapu::product {

using mdp::StateId;

/// (s, q_1, ..., q_m[, q_safe]): a source state and one DFA state per
/// mission component, tasks first.
struct ProductState {
  StateId s = 0;
  std::vector<int> q;

  auto operator<=>(const ProductState&) const = default;
  bool operator==(const ProductState&) const = default;
};

nlohmann::json to_json(const ProductState& ps);

/// One robot's MDP composed with every DFA of a mission. States are
/// discovered breadth-first; further roots may be added later with
/// explore_from (the team construction needs tuples such as a robot's
/// start position paired with progress made by another robot).
///
/// Actions keep the source model's ids. Safety-violating states have no
/// enabled actions.
class ProductMdp {
 public:
  ProductMdp(std::shared_ptr<const mdp::Mdp> source,
             std::shared_ptr<const logic::CompiledMission> mission);

  const mdp::Mdp& model() const noexcept { return model_; }
  const mdp::Mdp& source() const noexcept { return *source_; }
  const std::shared_ptr<const mdp::Mdp>& source_ptr() const noexcept { return source_; }
  const logic::CompiledMission& mission() const noexcept { return *mission_; }
  const std::shared_ptr<const logic::CompiledMission>& mission_ptr() const noexcept {
    return mission_;
  }

  int num_states() const noexcept { return model_.num_states(); }
  StateId initial() const noexcept { return model_.initial(); }
  int num_tasks() const noexcept { return static_cast<int>(mission_->tasks.size()); }
  bool has_safety() const noexcept { return mission_->safety.has_value(); }

  const ProductState& state(StateId id) const { return states_.at(id); }
  std::optional<StateId> find(const ProductState& ps) const;
  /// Adds `root` (if new) and everything reachable from it.
  StateId explore_from(const ProductState& root);

  /// Advances every DFA component on the label of source state `s`.
  std::vector<int> advance(const std::vector<int>& q, StateId s) const;
  /// DFA initial states advanced on the label of `s`.
  std::vector<int> initial_q_at(StateId s) const;

  bool task_accepting(StateId id, int k) const;
  bool tasks_accepting(StateId id) const;
  /// Safety DFA has left its accepting states.
  bool violated(StateId id) const;
  /// All tasks accepting and safety intact.
  bool accepting(StateId id) const { return tasks_accepting(id) && !violated(id); }
  bool is_failure(StateId id) const { return source_->is_failure(state(id).s); }

  /// Combinatorial size |S|·Π|Q| over the source's operational states
  /// (the designated failure state excluded), with or without the safety
  /// factor.
  double full_size(bool include_safety = true) const;
  /// Same, counting every source state.
  double full_size_all_states(bool include_safety = true) const;

 private:
  void expand(std::size_t first);
  StateId intern(ProductState ps);

  std::shared_ptr<const mdp::Mdp> source_;
  std::shared_ptr<const logic::CompiledMission> mission_;
  // letters_[s][c]: label of source state s projected onto component c.
  std::vector<std::vector<logic::Letter>> letters_;
  mdp::Mdp model_;
  std::vector<ProductState> states_;
  std::map<ProductState, StateId> index_;
};

/// Throws InputError when a mission atom is not in the model's AP.
ProductMdp local_product(const mdp::Mdp& m, const logic::CompiledMission& mission);
ProductMdp local_product(std::shared_ptr<const mdp::Mdp> m,
                         std::shared_ptr<const logic::CompiledMission> mission);

mdp::StateSet accepting_states(const ProductMdp& pm);
mdp::StateSet violation_states(const ProductMdp& pm);

}  // namespace stapu::product
