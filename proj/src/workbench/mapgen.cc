#include "stapu/workbench/mapgen.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "stapu/errors.h"
#include "stapu/logic/parser.h"

namespace stapu::workbench {
namespace {

void check_node(const MapSpec& s, int v, const std::string& what) {
  if (v < 0 || v >= s.nodes) throw InputError(what + " " + std::to_string(v) + " is not a node");
}

}  // namespace

void MapSpec::check() const {
  if (nodes <= 0) throw InputError("map needs at least one node");
  std::vector<std::vector<int>> adj(nodes);
  for (auto [a, b] : edges) {
    check_node(*this, a, "edge end");
    check_node(*this, b, "edge end");
    if (a == b) throw InputError("self-loop edge at " + std::to_string(a));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(nodes, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      stack.push_back(w);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InputError("map graph is disconnected");
  for (auto [v, p] : failpoints) {
    check_node(*this, v, "failure point");
    if (!(p > 0.0 && p < 1.0)) throw InputError("failure probability must lie in (0,1)");
  }
  for (const auto* group : {&tasks, &hazards})
    for (const auto& [atom, at] : *group)
      for (int v : at) check_node(*this, v, "atom '" + atom + "' at");
  if (starts.empty()) throw InputError("map needs at least one robot start");
  for (int v : starts) check_node(*this, v, "start");
}

nlohmann::json MapSpec::to_json() const {
  nlohmann::json j;
  j["nodes"] = nodes;
  j["edges"] = edges;
  j["failpoints"] = nlohmann::json::array();
  for (auto [v, p] : failpoints) j["failpoints"].push_back({{"node", v}, {"pfail", p}});
  j["tasks"] = tasks;
  j["hazards"] = hazards;
  j["starts"] = starts;
  j["seed"] = seed;
  return j;
}

MapSpec MapSpec::from_json(const nlohmann::json& j) {
  try {
    MapSpec s;
    s.nodes = j.at("nodes").get<int>();
    s.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
    for (const auto& f : j.value("failpoints", nlohmann::json::array()))
      s.failpoints[f.at("node").get<int>()] = f.at("pfail").get<double>();
    s.tasks = j.value("tasks", decltype(s.tasks){});
    s.hazards = j.value("hazards", decltype(s.hazards){});
    s.starts = j.value("starts", std::vector<int>{0});
    s.seed = j.value("seed", std::uint64_t{0});
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad map spec: ") + e.what());
  }
}

std::vector<std::pair<int, int>> grid_edges(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) e.emplace_back(v, v + 1);
      if (r + 1 < rows) e.emplace_back(v, v + cols);
    }
  return e;
}

MapSpec random_spec(const GenOptions& o) {
  if (o.nodes <= 0 || o.robots <= 0) throw InputError("need positive node and robot counts");
  if (o.robots > o.nodes) throw InputError("more robots than nodes");
  if (o.failpoints < 0 || o.failpoints > o.nodes - o.robots)
    throw InputError("failure points must be between 0 and nodes - robots");
  if (!(o.pfail_lo > 0.0 && o.pfail_hi < 1.0 && o.pfail_lo <= o.pfail_hi))
    throw InputError("failure probability range must lie in (0,1)");
  if (o.tasks < 0 || o.hazards < 0) throw InputError("negative atom count");

  MapSpec s;
  s.nodes = o.nodes;
  s.seed = o.seed;
  // Independent streams so that changing one count leaves the rest of the
  // map as it was.
  std::seed_seq topo_seed{o.seed, std::uint64_t{1}}, place_seed{o.seed, std::uint64_t{2}},
      fail_seed{o.seed, std::uint64_t{3}};
  std::mt19937_64 topo(topo_seed), place(place_seed), fail(fail_seed);

  if (o.rows * o.cols == o.nodes) {
    s.edges = grid_edges(o.rows, o.cols);
  } else {
    for (int i = 1; i < o.nodes; ++i)
      s.edges.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(topo), i);
    std::uniform_int_distribution<int> pick(0, o.nodes - 1);
    for (int k = 0; k < o.nodes / 3; ++k) {
      int a = pick(topo), b = pick(topo);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (std::find(s.edges.begin(), s.edges.end(), std::pair{a, b}) == s.edges.end()) s.edges.emplace_back(a, b);
    }
  }

  std::vector<int> perm(o.nodes);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), place);
  s.starts.assign(perm.begin(), perm.begin() + o.robots);
  // Task and hazard atoms go on distinct non-start nodes while they last.
  std::vector<int> free(perm.begin() + o.robots, perm.end());
  std::size_t next = 0;
  auto place_atom = [&] {
    if (free.empty()) return perm[0];
    const int v = free[next % free.size()];
    ++next;
    return v;
  };
  for (int t = 1; t <= o.tasks; ++t) s.tasks["p" + std::to_string(t)] = {place_atom()};
  for (int h = 1; h <= o.hazards; ++h) s.hazards["h" + std::to_string(h)] = {place_atom()};

  std::vector<int> candidates = free;
  std::sort(candidates.begin(), candidates.end());
  std::shuffle(candidates.begin(), candidates.end(), fail);
  std::uniform_real_distribution<double> pf(o.pfail_lo, o.pfail_hi);
  std::vector<double> probs;
  for (std::size_t k = 0; k < candidates.size(); ++k) probs.push_back(o.pfail_lo == o.pfail_hi ? o.pfail_lo : pf(fail));
  for (int k = 0; k < o.failpoints; ++k) s.failpoints[candidates[k]] = probs[k];
  s.check();
  return s;
}

mdp::Mdp gen_map(const MapSpec& spec, int robot) {
  spec.check();
  if (robot < 0 || robot >= static_cast<int>(spec.starts.size())) throw InputError("no start for robot " + std::to_string(robot));
  const int n = spec.nodes;
  mdp::Mdp m(n + 1);
  m.set_failure_state(n);
  m.set_initial(spec.starts[robot]);
  for (int v = 0; v < n; ++v) m.intern_action("goto_" + std::to_string(v));
  for (const auto* group : {&spec.tasks, &spec.hazards})
    for (const auto& [atom, at] : *group) {
      m.intern_atom(atom);
      for (int v : at) m.add_label(v, atom);
    }
  auto move = [&](int from, int to) {
    const std::string name = "goto_" + std::to_string(to);
    if (auto it = spec.failpoints.find(from); it != spec.failpoints.end())
      m.add_choice(from, name, {{to, 1.0 - it->second}, {n, it->second}});
    else
      m.add_choice(from, name, {{to, 1.0}});
  };
  for (auto [a, b] : spec.edges) {
    move(a, b);
    move(b, a);
  }
  return m;
}

std::vector<mdp::Mdp> gen_robots(const MapSpec& spec) {
  std::vector<mdp::Mdp> out;
  for (int r = 0; r < static_cast<int>(spec.starts.size()); ++r) out.push_back(gen_map(spec, r));
  return out;
}

logic::Mission gen_mission(const MapSpec& spec) {
  logic::Mission m;
  for (const auto& [atom, at] : spec.tasks) m.tasks.push_back(logic::parse("F " + atom));
  if (!spec.hazards.empty()) {
    std::string body;
    for (const auto& [atom, at] : spec.hazards) body += (body.empty() ? "!" : " & !") + atom;
    m.safety = logic::parse("G (" + body + ")");
  }
  m.check();
  return m;
}

}  // namespace stapu::workbench
