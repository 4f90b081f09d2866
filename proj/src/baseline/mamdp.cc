#include "stapu/baseline/mamdp.h"

#include <algorithm>
#include <map>
#include <string>

#include "stapu/errors.h"

namespace stapu::baseline {
namespace {

constexpr const char* kIdleName = "idle";

struct Step {
  std::vector<StateId> to;
  double p;
};

}  // namespace

double mamdp_full_size(const std::vector<mdp::Mdp>& models, const logic::CompiledMission& mission) {
  double size = 1.0;
  for (const auto& m : models) size *= m.num_operational_states();
  for (std::size_t c = 0; c < mission.num_components(); ++c) size *= mission.component(c).num_states();
  return size;
}

MamdpModel build_mamdp(const std::vector<mdp::Mdp>& models, const logic::Mission& mission,
                       double ceiling) {
  if (models.empty()) throw InputError("no robot models");
  mission.check();
  MamdpModel mm;
  mm.num_robots = static_cast<int>(models.size());
  mm.mission = std::make_shared<const logic::CompiledMission>(logic::CompiledMission::compile(mission));
  const auto& cm = *mm.mission;
  for (std::size_t r = 0; r < models.size(); ++r)
    for (const auto& a : mission.atoms())
      if (std::find(models[r].atoms().begin(), models[r].atoms().end(), a) == models[r].atoms().end())
        throw InputError("robot " + std::to_string(r) + " has no atom '" + a + "'");
  mm.full_size = mamdp_full_size(models, cm);
  if (mm.full_size > ceiling) throw CeilingExceeded(mm.full_size, ceiling);

  const int n = mm.num_robots;
  const std::size_t k = cm.num_components();
  // letters[r][s][c]: label of robot r's state s projected on component c.
  std::vector<std::vector<std::vector<logic::Letter>>> letters(n);
  for (int r = 0; r < n; ++r) {
    letters[r].resize(models[r].num_states());
    for (StateId s = 0; s < models[r].num_states(); ++s)
      for (std::size_t c = 0; c < k; ++c)
        letters[r][s].push_back(cm.component(c).letter_of(models[r].label_names(s)));
  }
  auto advance = [&](std::vector<int> q, const std::vector<StateId>& s) {
    for (std::size_t c = 0; c < k; ++c) {
      logic::Letter l = 0;
      for (int r = 0; r < n; ++r) l |= letters[r][s[r]][c];
      q[c] = cm.component(c).next(q[c], l);
    }
    return q;
  };
  auto accepting = [&](const std::vector<int>& t) {
    for (std::size_t c = 0; c < cm.tasks.size(); ++c)
      if (!cm.tasks[c].accepting(t[n + c])) return false;
    return true;
  };
  auto violated = [&](const std::vector<int>& t) {
    return cm.safety && !cm.safety->accepting(t[n + cm.tasks.size()]);
  };

  std::map<std::vector<int>, StateId> index;
  auto intern = [&](std::vector<int> t) {
    auto [it, fresh] = index.emplace(t, static_cast<StateId>(mm.tuples.size()));
    if (fresh) mm.tuples.push_back(std::move(t));
    return it->second;
  };

  std::vector<StateId> s0;
  std::vector<int> q0;
  for (const auto& m : models) s0.push_back(m.initial());
  for (std::size_t c = 0; c < k; ++c) q0.push_back(cm.component(c).initial());
  q0 = advance(q0, s0);
  std::vector<int> init(s0.begin(), s0.end());
  init.insert(init.end(), q0.begin(), q0.end());
  intern(init);

  for (const auto& a : cm.mission.atoms()) mm.model.intern_atom(a);
  std::vector<std::vector<mdp::Choice>> choices;
  for (std::size_t i = 0; i < mm.tuples.size(); ++i) {
    const std::vector<int> cur = mm.tuples[i];
    choices.emplace_back();
    if (accepting(cur) || violated(cur)) continue;
    std::vector<StateId> s(cur.begin(), cur.begin() + n);
    const std::vector<int> q(cur.begin() + n, cur.end());
    // Per-robot options: idle first, then the enabled actions.
    std::vector<std::vector<const mdp::Choice*>> opts(n);
    for (int r = 0; r < n; ++r) {
      opts[r].push_back(nullptr);
      for (const auto& c : models[r].choices(s[r])) opts[r].push_back(&c);
    }
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
      std::string name;
      double cost = 0.0;
      std::vector<Step> steps{{s, 1.0}};
      for (int r = 0; r < n; ++r) {
        const auto* c = opts[r][pick[r]];
        if (r) name += '|';
        if (!c) {
          name += kIdleName;
          continue;
        }
        name += models[r].action_name(c->action);
        cost += c->cost;
        std::vector<Step> next;
        for (const auto& st : steps)
          for (const auto& o : c->outcomes) {
            Step x = st;
            x.to[r] = o.to;
            x.p *= o.p;
            next.push_back(std::move(x));
          }
        steps = std::move(next);
      }
      std::map<StateId, double> dist;
      for (const auto& st : steps) {
        auto t = st.to;
        std::vector<int> tuple(t.begin(), t.end());
        auto nq = advance(q, t);
        tuple.insert(tuple.end(), nq.begin(), nq.end());
        dist[intern(std::move(tuple))] += st.p;
      }
      mdp::Choice ch;
      ch.action = mm.model.intern_action(name);
      ch.cost = cost;
      for (auto [to, p] : dist) ch.outcomes.push_back({to, p});
      choices.back().push_back(std::move(ch));
      int r = 0;
      for (; r < n; ++r) {
        if (++pick[r] < opts[r].size()) break;
        pick[r] = 0;
      }
      if (r == n) break;
    }
  }

  mm.model.resize(static_cast<int>(mm.tuples.size()));
  mm.model.set_initial(0);
  bool costs = false;
  for (const auto& m : models) costs = costs || m.has_costs();
  mm.model.set_has_costs(costs);
  mm.accepting.assign(mm.tuples.size(), false);
  mm.violated.assign(mm.tuples.size(), false);
  for (StateId id = 0; id < static_cast<StateId>(mm.tuples.size()); ++id) {
    for (auto& c : choices[id]) mm.model.set_choice(id, std::move(c));
    mm.accepting[id] = accepting(mm.tuples[id]);
    mm.violated[id] = violated(mm.tuples[id]);
  }
  return mm;
}

MamdpSolution solve_mamdp(const MamdpModel& mm, const mdp::SolveOptions& opts) {
  auto r = mdp::max_reach(mm.model, mm.accepting, mm.violated, opts);
  return {r.value.at(mm.model.initial()), std::move(r.policy), r.iterations};
}

}  // namespace stapu::baseline
