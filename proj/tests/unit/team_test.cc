#include <doctest.h>

#include <cmath>
#include <random>

#include "stapu/errors.h"
#include "stapu/logic/parser.h"
#include "stapu/team/team.h"
#include "support/models.h"

using namespace stapu;
using team::build_team;
using team::solve_stapu;

namespace {

logic::Mission mission_of(std::vector<std::string> tasks) {
  logic::Mission m;
  for (const auto& t : tasks) m.tasks.push_back(logic::parse(t));
  return m;
}

std::vector<product::ProductMdp> products_for(const std::vector<mdp::Mdp>& robots,
                                              const logic::Mission& mission) {
  auto cm = std::make_shared<const logic::CompiledMission>(logic::CompiledMission::compile(mission));
  std::vector<product::ProductMdp> out;
  for (const auto& r : robots)
    out.push_back(product::local_product(std::make_shared<const mdp::Mdp>(r), cm));
  return out;
}

double single_robot_value(const mdp::Mdp& robot, const logic::Mission& mission) {
  if (mission.tasks.empty()) return 1.0;
  auto pm = product::local_product(robot, logic::CompiledMission::compile(mission));
  auto r = mdp::max_reach(pm.model(), product::accepting_states(pm), product::violation_states(pm));
  return r.value[pm.initial()];
}

// max over every task -> robot assignment of the product of independent
// single-robot optima.
double brute_force_eq1(const std::vector<mdp::Mdp>& robots, const logic::Mission& mission) {
  const int n = static_cast<int>(robots.size());
  const int m = static_cast<int>(mission.tasks.size());
  int combos = 1;
  for (int k = 0; k < m; ++k) combos *= n;
  double best = 0.0;
  for (int code = 0; code < combos; ++code) {
    std::vector<logic::Mission> parts(n);
    for (int k = 0, c = code; k < m; ++k, c /= n) parts[c % n].tasks.push_back(mission.tasks[k]);
    double v = 1.0;
    for (int r = 0; r < n; ++r) v *= single_robot_value(robots[r], parts[r]);
    best = std::max(best, v);
  }
  return best;
}

mdp::Mdp labelled(mdp::Mdp m, const std::vector<std::pair<int, std::string>>& labels,
                  const std::vector<std::string>& atoms) {
  for (const auto& a : atoms) m.intern_atom(a);
  for (const auto& [s, a] : labels) m.add_label(s, a);
  return m;
}

std::vector<std::string> task_atoms(int m) {
  std::vector<std::string> out;
  for (int k = 1; k <= m; ++k) out.push_back("p" + std::to_string(k));
  return out;
}

}  // namespace

TEST_CASE("team: full sizes for two 30-node robots") {
  const std::vector<std::pair<int, double>> expect = {{3, 480}, {5, 1920}, {7, 7680}, {9, 30720}};
  for (auto [m, size] : expect) {
    auto atoms = task_atoms(m);
    std::vector<std::pair<int, std::string>> labels;
    std::vector<std::string> tasks;
    for (int k = 0; k < m; ++k) {
      labels.emplace_back(2 + 3 * k, atoms[k]);
      tasks.push_back("F " + atoms[k]);
    }
    auto map = labelled(testing::corridor(30, {1, 8, 14}, 0.1), labels, atoms);
    auto g = build_team(products_for({map, map}, mission_of(tasks)));
    CHECK(g.full_size() == size);
    CHECK(g.model().num_states() <= size + 2 * (1 << m));
  }
}

TEST_CASE("team: switch transitions keep the DFA vector") {
  auto atoms = task_atoms(3);
  auto map = labelled(testing::corridor(8, {3}, 0.2), {{2, "p1"}, {5, "p2"}, {7, "p3"}}, atoms);
  auto g = build_team(products_for({map, map, map}, mission_of({"F p1", "F p2", "F p3"})));
  int switches = 0;
  for (int s = 0; s < g.model().num_states(); ++s) {
    const auto* c = g.model().find_choice(s, g.switch_action());
    if (!c) continue;
    ++switches;
    REQUIRE(c->outcomes.size() == 1);
    CHECK(c->outcomes[0].p == 1.0);
    CHECK(c->cost == 0.0);
    const auto& from = g.product_state(s);
    const auto& to = g.product_state(c->outcomes[0].to);
    CHECK(from.q == to.q);
    CHECK(to.s == g.entry(g.state(c->outcomes[0].to).robot));
    CHECK(*g.successor(g.state(s).robot) == g.state(c->outcomes[0].to).robot);
    CHECK_FALSE(map.is_failure(from.s));
  }
  CHECK(switches > 0);
  CHECK_FALSE(g.successor(2).has_value());
}

TEST_CASE("team: identical robots, one task behind one failure point") {
  auto map = labelled(testing::corridor(3, {1}, 0.1), {{2, "p"}}, {"p"});
  auto sol = solve_stapu(build_team(products_for({map, map}, mission_of({"F p"}))));
  CHECK(sol.value == doctest::Approx(0.9).epsilon(1e-9));
  REQUIRE(sol.allocation[0].has_value());
  CHECK(*sol.allocation[0] == 0);
  CHECK(team::check_single_switch(sol));
}

TEST_CASE("team: better robot gets the task") {
  auto r1 = labelled(testing::corridor(3, {1}, 0.1), {{2, "p"}}, {"p"});
  auto r2 = labelled(testing::corridor(3, {1}, 0.5), {{2, "p"}}, {"p"});
  auto sol = solve_stapu(build_team(products_for({r1, r2}, mission_of({"F p"}))));
  CHECK(sol.value == doctest::Approx(0.9));
  CHECK(sol.allocation[0] == 0);
  auto swapped = solve_stapu(build_team(products_for({r2, r1}, mission_of({"F p"}))));
  CHECK(swapped.value == doctest::Approx(0.9));
  CHECK(swapped.allocation[0] == 1);
  CHECK(swapped.switches[0] == 1);
}

TEST_CASE("team: each robot can do exactly one task") {
  auto r1 = labelled(testing::corridor(2, {}, 0.0), {{1, "a"}}, {"a", "b"});
  auto r2 = labelled(testing::corridor(2, {}, 0.0), {{1, "b"}}, {"a", "b"});
  auto sol = solve_stapu(build_team(products_for({r1, r2}, mission_of({"F a", "F b"}))));
  CHECK(sol.value == 1.0);
  CHECK(sol.allocation[0] == 0);
  CHECK(sol.allocation[1] == 1);
  auto j = sol.to_json();
  CHECK(j["allocation"] == nlohmann::json::array({0, 1}));
  CHECK(j["segments"].size() == 2);
  CHECK(j["segments"][1]["entry"]["s"] == 0);
}

TEST_CASE("team: single robot without a closed ring has no switch") {
  auto map = labelled(testing::corridor(3, {1}, 0.1), {{2, "p"}}, {"p"});
  auto g = build_team(products_for({map}, mission_of({"F p"})));
  for (int s = 0; s < g.model().num_states(); ++s)
    CHECK(g.model().find_choice(s, g.switch_action()) == nullptr);
  auto sol = solve_stapu(std::move(g));
  CHECK(sol.value == doctest::Approx(0.9));
  CHECK(team::check_single_switch(sol));

  // Closing the ring adds value-neutral self-switches.
  auto closed = build_team(products_for({map}, mission_of({"F p"})), {.close_ring = true});
  bool any = false;
  for (int s = 0; s < closed.model().num_states(); ++s)
    any = any || closed.model().find_choice(s, closed.switch_action()) != nullptr;
  CHECK(any);
  CHECK(solve_stapu(std::move(closed)).value == doctest::Approx(0.9));
}

TEST_CASE("team: closing the ring lets a robot restart and overestimates") {
  // 0 - 1 - 2 - 3 - 4, robot 0 starts at 2, tasks at both ends, moves out
  // of 1 and 3 fail half the time. Robot 1 cannot do anything useful.
  auto line = testing::corridor(5, {1, 3}, 0.5);
  line.set_initial(2);
  auto r0 = labelled(line, {{0, "a"}, {4, "b"}}, {"a", "b"});
  auto r1 = labelled(testing::corridor(2, {}, 0.0), {}, {"a", "b"});
  auto mission = mission_of({"F a", "F b"});
  const double open = solve_stapu(build_team(products_for({r0, r1}, mission))).value;
  const double closed =
      solve_stapu(build_team(products_for({r0, r1}, mission), {.close_ring = true})).value;
  CHECK(open == doctest::Approx(0.125));
  CHECK(closed == doctest::Approx(0.25));
}

TEST_CASE("team: check_class") {
  mdp::Mdp m(3);
  m.set_failure_state(2);
  m.add_choice(0, "a", {{1, 0.9}, {2, 0.1}});
  m.add_choice(1, "a", {{0, 1.0}});
  CHECK(team::check_class(m));
  m.add_choice(0, "b", {{1, 0.5}, {0, 0.5}});
  CHECK_FALSE(team::check_class(m));
}

TEST_CASE("team: check_single_switch flags two reachable switches") {
  // Robot 0 branches to two live states and switches from both.
  mdp::Mdp r0(4);
  for (auto a : {"p"}) r0.intern_atom(a);
  r0.add_choice(0, "split", {{1, 0.5}, {2, 0.5}});
  r0.add_choice(1, "back", {{0, 1.0}});
  r0.add_choice(2, "back", {{0, 1.0}});
  r0.set_failure_state(3);
  auto r1 = labelled(testing::corridor(2, {}, 0.0), {{1, "p"}}, {"p"});
  auto sol = solve_stapu(build_team(products_for({r0, r1}, mission_of({"F p"}))));
  CHECK(sol.value == 1.0);
  CHECK(team::check_single_switch(sol));
  const auto& g = *sol.team;
  const auto split = *g.model().find_action("split");
  auto hacked = sol;
  hacked.policy[g.model().initial()] = split;
  for (const auto& o : g.model().find_choice(g.model().initial(), split)->outcomes)
    hacked.policy[o.to] = g.switch_action();
  CHECK_FALSE(team::check_single_switch(hacked));
}

TEST_CASE("team: value equals the brute-force allocation optimum") {
  std::mt19937_64 rng(2024);
  int instances = 0;
  for (int k = 0; k < 60; ++k) {
    const int m = 1 + k % 2;
    auto atoms = task_atoms(m);
    std::vector<mdp::Mdp> robots;
    for (int r = 0; r < 2; ++r) {
      const int nodes = std::uniform_int_distribution<int>(4, 8)(rng);
      auto map = testing::random_map(rng, nodes, 2, 0);
      std::vector<std::pair<int, std::string>> labels;
      for (const auto& a : atoms)
        labels.emplace_back(std::uniform_int_distribution<int>(1, nodes - 1)(rng), a);
      robots.push_back(labelled(map, labels, atoms));
      CHECK(team::check_class(robots.back()));
    }
    std::vector<std::string> tasks;
    for (const auto& a : atoms) tasks.push_back("F " + a);
    auto mission = mission_of(tasks);
    auto sol = solve_stapu(build_team(products_for(robots, mission)));
    const double expect = brute_force_eq1(robots, mission);
    CAPTURE(k);
    CHECK(std::abs(sol.value - expect) <= 1e-6);
    CHECK(team::check_single_switch(sol));
    ++instances;
  }
  CHECK(instances >= 50);
}

TEST_CASE("team: removing switches never increases the value") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 30; ++k) {
    auto atoms = task_atoms(2);
    std::vector<mdp::Mdp> robots;
    for (int r = 0; r < 2; ++r) {
      auto map = testing::random_map(rng, 6, 2, 0);
      robots.push_back(labelled(map, {{1 + r, "p1"}, {5 - r, "p2"}}, atoms));
    }
    auto g = build_team(products_for(robots, mission_of({"F p1", "F p2"})));
    mdp::Mdp stripped(g.model().num_states());
    stripped.set_initial(g.model().initial());
    for (const auto& a : g.model().actions()) stripped.intern_action(a);
    for (int s = 0; s < g.model().num_states(); ++s)
      for (const auto& c : g.model().choices(s))
        if (c.action != g.switch_action()) stripped.set_choice(s, c);
    const double with = mdp::max_reach(g.model(), g.target(), g.avoid()).value[g.model().initial()];
    const double without = mdp::max_reach(stripped, g.target(), g.avoid()).value[g.model().initial()];
    CHECK(without <= with + 1e-9);
  }
}

TEST_CASE("team: rejects bad inputs") {
  auto map = labelled(testing::corridor(3, {}, 0.0), {{2, "p"}, {1, "q"}}, {"p", "q"});
  auto a = products_for({map}, mission_of({"F p"}));
  auto b = products_for({map}, mission_of({"F q"}));
  CHECK_THROWS_AS(build_team({a[0], b[0]}), InputError);
  CHECK_THROWS_AS(build_team({a[0]}, {99}, {0}, {0}), InputError);
  CHECK_THROWS_AS(build_team({a[0], a[0]}, {0, 0}, {0}, {0, 0}), InputError);
}
