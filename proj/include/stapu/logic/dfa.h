#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/formula.h"

namespace stapu::logic {

/// A letter is a bitmask over `Dfa::atoms()`: bit i set iff atoms()[i] holds.
using Letter = std::uint32_t;

/// Complete deterministic automaton over the subsets of the atoms that occur
/// in its source formula. Labels over a larger proposition set are projected
/// before lookup.
class Dfa {
 public:
  Dfa() = default;
  Dfa(std::vector<std::string> atoms, int initial, std::vector<bool> accepting,
      std::vector<int> delta, std::vector<std::string> state_names,
      Fragment fragment);

  int num_states() const noexcept { return static_cast<int>(accepting_.size()); }
  int initial() const noexcept { return initial_; }
  bool accepting(int q) const { return accepting_.at(q); }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  std::size_t num_letters() const noexcept { return std::size_t{1} << atoms_.size(); }
  Fragment fragment() const noexcept { return fragment_; }
  /// Residual formula text of a state (a representative after minimization).
  const std::string& state_name(int q) const { return names_.at(q); }

  int next(int q, Letter letter) const {
    return delta_[static_cast<std::size_t>(q) * num_letters() + letter];
  }
  /// Projects a label (any set of proposition names) onto this DFA's atoms.
  Letter letter_of(const std::set<std::string>& label) const;
  Letter letter_of(std::span<const std::string> label) const;
  std::set<std::string> label_of(Letter letter) const;

  /// State reached after reading the trace from the initial state.
  int run(std::span<const Letter> trace) const;
  bool accepts(std::span<const Letter> trace) const { return accepting(run(trace)); }

  /// Absorbing accepting state (co-safe `true`), if any.
  std::optional<int> accepting_sink() const;
  /// Absorbing non-accepting state (safe `false` trap), if any.
  std::optional<int> rejecting_sink() const;

  nlohmann::json to_json() const;
  static Dfa from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> atoms_;
  int initial_ = 0;
  std::vector<bool> accepting_;
  std::vector<int> delta_;
  std::vector<std::string> names_;
  Fragment fragment_ = Fragment::kCoSafe;
};

/// Compiles a co-safe or safe formula by progression. States are canonical
/// residual formulas. For co-safe input the only accepting state is `true`;
/// for safe input every state except `false` accepts.
///
/// The fragment is taken from classify(f) unless given. Throws InputError
/// when the formula is outside the requested fragment.
Dfa compile(const Formula& f);
Dfa compile(const Formula& f, Fragment as);

/// Language-equivalent DFA with the fewest states (Moore partition
/// refinement after dropping unreachable states). States are renumbered in
/// breadth-first order from the initial state.
Dfa minimize(const Dfa& d);

}  // namespace stapu::logic
