#include <doctest.h>

#include <cmath>
#include <random>

#include "stapu/errors.h"
#include "stapu/mdp/mdp.h"
#include "stapu/mdp/solver.h"
#include "support/mdp_oracle.h"

using namespace stapu;
using namespace stapu::mdp;
using stapu::testing::enumerate_policies;
using stapu::testing::random_instance;

namespace {

StateSet set_of(int n, std::initializer_list<int> members) {
  StateSet s(n, false);
  for (int x : members) s[x] = true;
  return s;
}

}  // namespace

TEST_CASE("max_reach: one-step chain") {
  Mdp m(3);
  m.set_failure_state(2);
  m.add_choice(0, "a", {{1, 0.9}, {2, 0.1}});
  auto r = max_reach(m, set_of(3, {1}), set_of(3, {}));
  CHECK(r.value[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.value[1] == 1.0);
  CHECK(r.value[2] == 0.0);
  CHECK(r.policy[0] == *m.find_action("a"));
}

TEST_CASE("max_reach: one-step beats two-step") {
  // s0 -a-> {t:0.9, fail:0.1}; s0 -b-> {mid:1}; mid -c-> {t:0.5, fail:0.5}
  Mdp m(4);
  const int s0 = 0, mid = 1, t = 2, fail = 3;
  m.add_choice(s0, "a", {{t, 0.9}, {fail, 0.1}});
  m.add_choice(s0, "b", {{mid, 1.0}});
  m.add_choice(mid, "c", {{t, 0.5}, {fail, 0.5}});
  auto r = max_reach(m, set_of(4, {t}), set_of(4, {fail}));
  CHECK(r.value[s0] == doctest::Approx(0.9));
  CHECK(m.action_name(r.policy[s0]) == "a");
  CHECK(r.value[mid] == doctest::Approx(0.5));
}

TEST_CASE("max_reach: target and avoid values, ties broken by lowest action") {
  Mdp m(3);
  m.add_choice(0, "x", {{1, 1.0}});
  m.add_choice(0, "y", {{1, 1.0}});
  m.add_choice(1, "x", {{1, 1.0}});
  m.add_choice(2, "x", {{0, 1.0}});
  auto r = max_reach(m, set_of(3, {1}), set_of(3, {2}));
  CHECK(r.value[1] == 1.0);
  CHECK(r.value[2] == 0.0);
  CHECK(m.action_name(r.policy[0]) == "x");
}

TEST_CASE("max_reach: extracted policy is proper in end components") {
  // s0 may loop forever (value preserved) or move to t; the loop must not be chosen.
  Mdp m(2);
  m.add_choice(0, "stay", {{0, 1.0}});
  m.add_choice(0, "go", {{1, 1.0}});
  auto r = max_reach(m, set_of(2, {1}), set_of(2, {}));
  CHECK(r.value[0] == 1.0);
  CHECK(m.action_name(r.policy[0]) == "go");
}

TEST_CASE("max_reach: prob0 / prob1 precomputation") {
  Mdp m(4);
  m.add_choice(0, "a", {{0, 0.5}, {1, 0.5}});
  m.add_choice(1, "a", {{1, 1.0}});
  m.add_choice(2, "a", {{2, 1.0}});
  m.add_choice(3, "a", {{0, 1.0}});
  auto target = set_of(4, {1}), avoid = set_of(4, {});
  auto zero = prob0(m, target, avoid);
  auto one = prob1e(m, target, avoid);
  CHECK(zero == set_of(4, {2}));
  CHECK(one == set_of(4, {0, 1, 3}));
  auto r = max_reach(m, target, avoid);
  CHECK(r.value[0] == 1.0);
  CHECK(r.value[3] == 1.0);
  CHECK(r.iterations == 1);
}

TEST_CASE("max_reach: rejects intersecting target and avoid") {
  Mdp m(2);
  CHECK_THROWS_AS(max_reach(m, set_of(2, {1}), set_of(2, {1})), InputError);
}

TEST_CASE("max_reach: iteration cap raises SolverError") {
  Mdp m(3);
  m.add_choice(0, "a", {{0, 0.999}, {1, 0.0005}, {2, 0.0005}});
  SolveOptions opts;
  opts.max_iterations = 3;
  CHECK_THROWS_AS(max_reach(m, set_of(3, {1}), set_of(3, {}), opts), SolverError);
}

TEST_CASE("max_reach agrees with exhaustive memoryless policy enumeration") {
  std::mt19937_64 rng(20240611);
  int compared = 0;
  for (int k = 0; k < 200; ++k) {
    auto inst = random_instance(rng);
    auto expect = enumerate_policies(inst.m, inst.target, inst.avoid);
    auto r = max_reach(inst.m, inst.target, inst.avoid);
    auto achieved = policy_reach(inst.m, r.policy, inst.target, inst.avoid,
                                 SolveOptions{1e-13, 1000000, {}});
    for (int s = 0; s < inst.m.num_states(); ++s) {
      CAPTURE(k);
      CAPTURE(s);
      CHECK(std::abs(r.value[s] - expect[s]) <= 1e-6);
      CHECK(std::abs(achieved[s] - expect[s]) <= 1e-6);
      CHECK(r.value[s] >= 0.0);
      CHECK(r.value[s] <= 1.0 + 1e-9);
      if (r.policy[s] != kNoAction) CHECK(inst.m.find_choice(s, r.policy[s]) != nullptr);
      ++compared;
    }
  }
  CHECK(compared > 600);
}

TEST_CASE("value iteration is monotone from zero") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    auto inst = random_instance(rng);
    std::vector<double> prev(inst.m.num_states(), -1.0);
    bool monotone = true;
    SolveOptions opts;
    opts.on_iteration = [&](int, const std::vector<double>& v) {
      for (std::size_t s = 0; s < v.size(); ++s)
        if (prev[s] >= 0.0 && v[s] < prev[s]) monotone = false;
      prev = v;
    };
    max_reach(inst.m, inst.target, inst.avoid, opts);
    CHECK(monotone);
  }
}

TEST_CASE("adding an action never decreases max_reach") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    auto inst = random_instance(rng);
    auto before = max_reach(inst.m, inst.target, inst.avoid).value;
    const int n = inst.m.num_states();
    std::uniform_int_distribution<int> pick(0, n - 1);
    Mdp more = inst.m;
    const int s = pick(rng), t1 = pick(rng), t2 = pick(rng);
    if (t1 == t2) {
      more.add_choice(s, "extra", {{t1, 1.0}});
    } else {
      more.add_choice(s, "extra", {{t1, 0.3}, {t2, 0.7}});
    }
    auto after = max_reach(more, inst.target, inst.avoid).value;
    for (int x = 0; x < n; ++x) CHECK(after[x] >= before[x] - 1e-6);
  }
}

TEST_CASE("nested_vi: cost tie-break among probability-optimal actions") {
  Mdp m(2);
  m.add_choice(0, "slow", {{1, 1.0}}, 5.0);
  m.add_choice(0, "fast", {{1, 1.0}}, 3.0);
  auto r = nested_vi(m, set_of(2, {1}), set_of(2, {}));
  CHECK(r.prob[0] == 1.0);
  CHECK(r.cost[0] == doctest::Approx(3.0));
  CHECK(m.action_name(r.policy[0]) == "fast");
}

TEST_CASE("nested_vi: probability dominates cost") {
  Mdp m(3);
  const int t = 1, fail = 2;
  m.add_choice(0, "safe", {{t, 0.9}, {fail, 0.1}}, 1.0);
  m.add_choice(0, "cheap", {{t, 0.8}, {fail, 0.2}}, 0.0);
  auto r = nested_vi(m, set_of(3, {t}), set_of(3, {fail}));
  CHECK(r.prob[0] == doctest::Approx(0.9));
  CHECK(m.action_name(r.policy[0]) == "safe");
  CHECK(r.cost[0] == doctest::Approx(1.0));
}

TEST_CASE("nested_vi: zero-probability state has cost 0") {
  Mdp m(3);
  m.add_choice(0, "a", {{2, 1.0}}, 4.0);
  m.add_choice(2, "a", {{2, 1.0}}, 4.0);
  auto r = nested_vi(m, set_of(3, {1}), set_of(3, {}));
  CHECK(r.prob[0] == 0.0);
  CHECK(r.cost[0] == 0.0);
}

TEST_CASE("nested_vi: zero-cost loops do not win") {
  Mdp m(2);
  m.add_choice(0, "loop", {{0, 1.0}}, 0.0);
  m.add_choice(0, "go", {{1, 1.0}}, 2.0);
  auto r = nested_vi(m, set_of(2, {1}), set_of(2, {}));
  CHECK(m.action_name(r.policy[0]) == "go");
  CHECK(r.cost[0] == doctest::Approx(2.0));
}

TEST_CASE("nested_vi probability equals max_reach") {
  std::mt19937_64 rng(4242);
  for (int k = 0; k < 200; ++k) {
    auto inst = random_instance(rng);
    Mdp m = inst.m;
    std::uniform_real_distribution<double> cost(0.0, 3.0);
    for (int s = 0; s < m.num_states(); ++s) {
      auto cs = m.choices(s);
      for (auto c : cs) {
        c.cost = cost(rng);
        m.set_choice(s, c);
      }
    }
    auto a = max_reach(m, inst.target, inst.avoid);
    auto b = nested_vi(m, inst.target, inst.avoid);
    auto achieved = policy_reach(m, b.policy, inst.target, inst.avoid,
                                 SolveOptions{1e-13, 1000000, {}});
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(std::abs(a.value[s] - b.prob[s]) <= 1e-9);
      CHECK(std::abs(achieved[s] - b.prob[s]) <= 1e-6);
      CHECK(b.cost[s] >= 0.0);
    }
  }
}

TEST_CASE("validate diagnostics") {
  Mdp m(3);
  m.set_failure_state(2);
  m.add_choice(0, "a", {{1, 0.5}, {2, 0.5}});
  m.add_choice(1, "a", {{1, 1.0}});
  CHECK(validate(m).empty());

  Mdp bad = m;
  bad.add_choice(0, "b", {{1, 0.5}, {2, 0.4}});
  auto d = validate(bad);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == Diagnostic::Kind::kProbabilitySum);
  CHECK(d[0].state == 0);
  CHECK(bad.action_name(*d[0].action) == "b");

  Mdp leaky = m;
  leaky.add_choice(2, "a", {{0, 1.0}});
  d = validate(leaky);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == Diagnostic::Kind::kFailureNotAbsorbing);

  Mdp island(2);
  d = validate(island);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == Diagnostic::Kind::kUnreachable);
  CHECK(d[0].state == 1);
}

TEST_CASE("model json round trip and rejection") {
  auto j = nlohmann::json::parse(R"({
    "states": 3, "initial": 0, "atoms": ["goal"],
    "labels": {"1": ["goal"]}, "failure_state": 2,
    "actions": ["go"],
    "trans": [{"from": 0, "action": "go", "outcomes": [{"to": 1, "p": 0.7}, {"to": 2, "p": 0.3}], "cost": 1.5},
              {"from": 1, "action": "go", "outcomes": [{"to": 1, "p": 1.0}], "cost": 0}]
  })");
  Mdp m = from_json(j);
  CHECK(m.num_states() == 3);
  CHECK(m.failure_state() == 2);
  CHECK(m.label_names(1) == std::set<std::string>{"goal"});
  CHECK(m.has_costs());
  CHECK(m.choices(0)[0].cost == 1.5);
  CHECK(to_json(from_json(to_json(m))) == to_json(m));

  auto broken = j;
  broken["trans"][0]["outcomes"][1]["p"] = 0.2;
  CHECK_THROWS_AS(from_json(broken), InputError);
  broken = j;
  broken["trans"][0]["action"] = "fly";
  CHECK_THROWS_AS(from_json(broken), InputError);
  broken = j;
  broken.erase("states");
  CHECK_THROWS_AS(from_json(broken), InputError);
  broken = j;
  broken["labels"]["1"] = {"nope"};
  CHECK_THROWS_AS(from_json(broken), InputError);
}
