#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stapu::mdp {

using StateId = int;
using ActionId = int;
/// Membership flags indexed by state.
using StateSet = std::vector<bool>;

struct Outcome {
  StateId to;
  double p;
};

/// One enabled action in one state.
struct Choice {
  ActionId action;
  std::vector<Outcome> outcomes;
  double cost = 0.0;
};

inline constexpr double kProbabilityTolerance = 1e-9;

/// Explicit-state MDP. Choices of a state are kept sorted by action id, so
/// "lowest action index" tie-breaking is "first matching choice".
class Mdp {
 public:
  Mdp() = default;
  explicit Mdp(int num_states) { resize(num_states); }

  int num_states() const noexcept { return static_cast<int>(choices_.size()); }
  void resize(int num_states);

  StateId initial() const noexcept { return initial_; }
  void set_initial(StateId s) { initial_ = s; }

  std::optional<StateId> failure_state() const noexcept { return failure_; }
  void set_failure_state(std::optional<StateId> s) { failure_ = s; }
  bool is_failure(StateId s) const noexcept { return failure_ && *failure_ == s; }
  /// States other than the designated failure state.
  int num_operational_states() const noexcept {
    return num_states() - (failure_ ? 1 : 0);
  }

  const std::vector<std::string>& actions() const noexcept { return actions_; }
  /// Id of a named action, registering it if new.
  ActionId intern_action(const std::string& name);
  std::optional<ActionId> find_action(const std::string& name) const;
  const std::string& action_name(ActionId a) const { return actions_.at(a); }

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  /// Registers an atom; returns its index.
  int intern_atom(const std::string& name);
  /// Atom indices true in a state, sorted.
  const std::vector<int>& label(StateId s) const { return labels_.at(s); }
  std::set<std::string> label_names(StateId s) const;
  void add_label(StateId s, const std::string& atom);

  const std::vector<Choice>& choices(StateId s) const { return choices_.at(s); }
  /// Adds or replaces the choice for `action` in `s`.
  void set_choice(StateId s, Choice c);
  void add_choice(StateId s, const std::string& action, std::vector<Outcome> outcomes,
                  double cost = 0.0);
  const Choice* find_choice(StateId s, ActionId a) const;

  bool has_costs() const noexcept { return has_costs_; }
  void set_has_costs(bool v) { has_costs_ = v; }

  std::size_t num_transitions() const;

  /// Same model with a different initial state.
  Mdp with_initial(StateId s) const;

 private:
  StateId initial_ = 0;
  std::optional<StateId> failure_;
  std::vector<std::string> actions_;
  std::vector<std::string> atoms_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::vector<Choice>> choices_;
  bool has_costs_ = false;
};

struct Diagnostic {
  enum class Kind { kProbabilitySum, kBadProbability, kBadTarget, kUnreachable, kFailureNotAbsorbing };
  Kind kind;
  StateId state;
  std::optional<ActionId> action;
  std::string message;
};

/// Probability-sum and range violations, out-of-range successors,
/// unreachable states and a non-absorbing failure state. Empty when well
/// formed.
std::vector<Diagnostic> validate(const Mdp& m);

/// Loads the model JSON schema:
/// {"states":N,"initial":i,"atoms":[...],"labels":{"i":[atoms]},
///  "failure_state":i|null,"actions":[names],
///  "trans":[{"from":i,"action":name,"outcomes":[{"to":i,"p":f}],"cost":f?}]}
/// Throws InputError on schema errors or any probability-related diagnostic.
Mdp from_json(const nlohmann::json& j);
nlohmann::json to_json(const Mdp& m);

}  // namespace stapu::mdp
