#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/logic/mission.h"
#include "stapu/mdp/mdp.h"

namespace stapu::workbench {

/// Topological map shared by every robot. Node i is state i; the failure
/// state is `nodes`.
struct MapSpec {
  int nodes = 0;
  /// Undirected edges; each yields one movement action per direction.
  std::vector<std::pair<int, int>> edges;
  /// Failure point -> probability of failing when leaving it.
  std::map<int, double> failpoints;
  /// Atom -> nodes it labels.
  std::map<std::string, std::vector<int>> tasks;
  std::map<std::string, std::vector<int>> hazards;
  /// Start node per robot.
  std::vector<int> starts{0};
  std::uint64_t seed = 0;

  /// Throws InputError when disconnected or otherwise malformed.
  void check() const;

  nlohmann::json to_json() const;
  static MapSpec from_json(const nlohmann::json& j);
};

/// Parameters for a seeded MapSpec. The graph is a rows x cols grid when
/// rows * cols == nodes, otherwise a random spanning tree plus nodes / 3
/// chords. Failure points are a prefix of one seeded permutation, so for a
/// fixed seed the set with k points contains the set with k - 1.
struct GenOptions {
  int nodes = 30;
  int rows = 5;
  int cols = 6;
  int failpoints = 5;
  double pfail_lo = 0.1;
  double pfail_hi = 0.1;
  int tasks = 3;
  int hazards = 0;
  int robots = 2;
  std::uint64_t seed = 0;
};

MapSpec random_spec(const GenOptions& o);

std::vector<std::pair<int, int>> grid_edges(int rows, int cols);

/// Robot `robot`'s model: the map started at its start node. Edges leaving
/// a failure point split between the neighbour and the failure state.
mdp::Mdp gen_map(const MapSpec& spec, int robot = 0);
std::vector<mdp::Mdp> gen_robots(const MapSpec& spec);

/// "F t" for every task atom, plus G over the negated hazards if any.
logic::Mission gen_mission(const MapSpec& spec);

}  // namespace stapu::workbench
