#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/dfa.h"
#include "stapu/logic/formula.h"

namespace stapu::logic {

/// Co-safe task formulas plus an optional safe constraint shared by every
/// robot.
struct Mission {
  std::vector<Formula> tasks;
  std::optional<Formula> safety;

  /// Throws InputError unless there is at least one task, every task is
  /// syntactically co-safe and the safety formula (if any) is syntactically
  /// safe.
  void check() const;

  std::set<std::string> atoms() const;

  /// {"tasks":["F p1",...],"safety":"G !p"|null}
  static Mission from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Mission with one minimized DFA per formula. Task DFAs come first; the
/// safety DFA is absent when the mission has no safety formula.
struct CompiledMission {
  Mission mission;
  std::vector<Dfa> tasks;
  std::optional<Dfa> safety;

  static CompiledMission compile(const Mission& m);

  /// Number of DFA components in a product state (tasks, then safety).
  std::size_t num_components() const { return tasks.size() + (safety ? 1 : 0); }
  const Dfa& component(std::size_t i) const {
    return i < tasks.size() ? tasks[i] : *safety;
  }
};

struct Diagnostic {
  std::string message;
};

/// Warns when two task formulas share an atomic proposition. Sharing with
/// the safety formula is fine. Sufficient syntactic check only.
std::vector<Diagnostic> validate_mission_decomposition(const Mission& m);

}  // namespace stapu::logic
