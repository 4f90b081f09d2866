#include "stapu/team/team.h"

#include <algorithm>
#include <deque>

#include "stapu/errors.h"

namespace stapu::team {

std::optional<int> TeamMdp::successor(int robot) const {
  const int pos = position_.at(robot);
  if (pos < 0) return std::nullopt;
  if (pos + 1 < static_cast<int>(order_.size())) return order_[pos + 1];
  if (closed_) return order_.front();
  return std::nullopt;
}

std::optional<StateId> TeamMdp::find(int robot, StateId local) const {
  auto it = index_.find({robot, local});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const product::ProductState& TeamMdp::product_state(StateId id) const {
  const auto& ts = state(id);
  return products_[ts.robot].state(ts.local);
}

double TeamMdp::full_size(bool include_safety) const {
  double n = 0.0;
  for (const auto& p : products_) n += p.full_size(include_safety);
  return n;
}

StateId TeamMdp::intern(int robot, StateId local) {
  auto [it, fresh] = index_.emplace(std::pair{robot, local}, static_cast<StateId>(states_.size()));
  if (fresh) {
    states_.push_back({robot, local});
    model_.resize(static_cast<int>(states_.size()));
    const auto& pm = products_[robot].model();
    for (int a : pm.label(local)) model_.add_label(it->second, pm.atoms()[a]);
  }
  return it->second;
}

TeamMdp build_team(std::vector<product::ProductMdp> products, std::vector<StateId> entries,
                   std::vector<int> q0, std::vector<int> order, const TeamOptions& opts) {
  const int n = static_cast<int>(products.size());
  if (n == 0) throw InputError("team needs at least one robot");
  if (static_cast<int>(entries.size()) != n) throw InputError("one entry state per robot required");
  const auto mission = products.front().mission().mission.to_json();
  for (const auto& p : products)
    if (p.mission().mission.to_json() != mission)
      throw InputError("all local products must share the same mission");
  if (order.empty()) throw InputError("empty robot order");
  std::vector<int> position(n, -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || order[k] >= n || position[order[k]] >= 0)
      throw InputError("robot order must list distinct robot indices");
    position[order[k]] = static_cast<int>(k);
  }
  for (int r = 0; r < n; ++r)
    if (entries[r] < 0 || entries[r] >= products[r].source().num_states())
      throw InputError("invalid entry state for robot " + std::to_string(r));

  TeamMdp g;
  g.products_ = std::move(products);
  g.entries_ = std::move(entries);
  g.q0_ = std::move(q0);
  g.order_ = std::move(order);
  g.position_ = std::move(position);
  g.closed_ = opts.close_ring;

  g.to_team_.resize(n);
  for (int r = 0; r < n; ++r) {
    for (const auto& name : g.products_[r].model().actions()) {
      if (name == kSwitchAction)
        throw InputError("action name '" + std::string(kSwitchAction) + "' is reserved");
      g.to_team_[r].push_back(g.model_.intern_action(name));
    }
  }
  g.zeta_ = g.model_.intern_action(kSwitchAction);
  g.to_local_.assign(n, std::vector<ActionId>(g.model_.actions().size(), mdp::kNoAction));
  for (int r = 0; r < n; ++r)
    for (std::size_t a = 0; a < g.to_team_[r].size(); ++a)
      g.to_local_[r][g.to_team_[r][a]] = static_cast<ActionId>(a);

  bool costs = false;
  for (const auto& p : g.products_) costs = costs || p.model().has_costs();
  g.model_.set_has_costs(costs);

  const int first = g.order_.front();
  const StateId root = g.products_[first].explore_from({g.entries_[first], g.q0_});
  g.model_.set_initial(g.intern(first, root));

  const auto& cm = g.products_.front().mission();
  auto switchable = [&](int r, StateId local) {
    const auto& ps = g.products_[r].state(local);
    if (g.products_[r].source().is_failure(ps.s) && ps.s != g.entries_[r]) return false;
    for (std::size_t k = 0; k < cm.tasks.size(); ++k) {
      const auto& dfa = cm.tasks[k];
      const int q = ps.q[k];
      if (q != dfa.initial() && !dfa.accepting(q) && q != g.q0_[k]) return false;
    }
    return true;
  };

  std::vector<bool> target, avoid;
  for (std::size_t i = 0; i < g.states_.size(); ++i) {
    const StateId id = static_cast<StateId>(i);
    const auto [r, local] = g.states_[i];
    auto& pm = g.products_[r];
    target.resize(i + 1);
    avoid.resize(i + 1);
    if (pm.violated(local)) {
      avoid[i] = true;
      continue;
    }
    if (pm.tasks_accepting(local)) {
      target[i] = true;
      continue;
    }
    const auto choices = pm.model().choices(local);
    for (const auto& c : choices) {
      mdp::Choice tc{g.to_team_[r][c.action], {}, c.cost};
      for (const auto& o : c.outcomes) tc.outcomes.push_back({g.intern(r, o.to), o.p});
      g.model_.set_choice(id, std::move(tc));
    }
    const auto next = g.successor(r);
    if (next && switchable(r, local)) {
      const auto q = pm.state(local).q;
      const StateId to = g.products_[*next].explore_from({g.entries_[*next], q});
      g.model_.set_choice(id, mdp::Choice{g.zeta_, {{g.intern(*next, to), 1.0}}, 0.0});
    }
  }
  g.target_ = std::move(target);
  g.avoid_ = std::move(avoid);
  return g;
}

TeamMdp build_team(std::vector<product::ProductMdp> products, const TeamOptions& opts) {
  if (products.empty()) throw InputError("team needs at least one robot");
  std::set<std::string> label;
  std::vector<StateId> entries;
  std::vector<int> order;
  for (std::size_t r = 0; r < products.size(); ++r) {
    const auto& src = products[r].source();
    entries.push_back(src.initial());
    order.push_back(static_cast<int>(r));
    for (const auto& a : src.label_names(src.initial())) label.insert(a);
  }
  const auto& cm = products.front().mission();
  std::vector<int> q0;
  for (std::size_t c = 0; c < cm.num_components(); ++c) {
    const auto& dfa = cm.component(c);
    q0.push_back(dfa.next(dfa.initial(), dfa.letter_of(label)));
  }
  return build_team(std::move(products), std::move(entries), std::move(q0), std::move(order), opts);
}

namespace {

// States reachable from the team initial state under `pi`, breadth first.
std::vector<StateId> reachable(const TeamMdp& g, const mdp::Policy& pi) {
  const auto& m = g.model();
  std::vector<StateId> out;
  std::vector<bool> seen(m.num_states(), false);
  std::deque<StateId> queue{m.initial()};
  seen[m.initial()] = true;
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    out.push_back(s);
    if (g.target()[s] || g.avoid()[s] || pi[s] == mdp::kNoAction) continue;
    for (const auto& o : m.find_choice(s, pi[s])->outcomes) {
      if (!seen[o.to]) {
        seen[o.to] = true;
        queue.push_back(o.to);
      }
    }
  }
  return out;
}

}  // namespace

StapuSolution solve_stapu(TeamMdp g, const SolveStapuOptions& opts) {
  return solve_stapu(std::make_shared<const TeamMdp>(std::move(g)), opts);
}

StapuSolution solve_stapu(std::shared_ptr<const TeamMdp> g, const SolveStapuOptions& opts) {
  StapuSolution sol;
  sol.team = g;
  const auto& m = g->model();
  if (opts.minimise_cost && m.has_costs()) {
    auto r = mdp::nested_vi(m, g->target(), g->avoid(), opts.vi);
    sol.values = std::move(r.prob);
    sol.costs = std::move(r.cost);
    sol.policy = std::move(r.policy);
  } else {
    auto r = mdp::max_reach(m, g->target(), g->avoid(), opts.vi);
    sol.values = std::move(r.value);
    sol.policy = std::move(r.policy);
  }
  sol.value = std::clamp(sol.values[m.initial()], 0.0, 1.0);

  const auto reach = reachable(*g, sol.policy);

  const int n = g->num_robots();
  sol.switches.assign(n, 0);
  for (int r = 0; r < n; ++r) sol.segments.push_back({r, std::nullopt, {}});
  sol.segments[g->order().front()].entry = m.initial();
  for (StateId s : reach) {
    const int r = g->state(s).robot;
    const ActionId a = sol.policy[s];
    if (g->target()[s] || g->avoid()[s] || a == mdp::kNoAction) continue;
    sol.segments[r].choices.emplace_back(s, a);
    if (a == g->switch_action()) {
      ++sol.switches[r];
      const StateId to = m.find_choice(s, a)->outcomes.front().to;
      auto& seg = sol.segments[g->state(to).robot];
      if (!seg.entry) seg.entry = to;
    }
  }

  const auto& first = g->product(g->order().front());
  const int tasks = first.num_tasks();
  sol.allocation.assign(tasks, std::nullopt);
  for (int k = 0; k < tasks; ++k) {
    for (StateId s : reach) {
      const auto& ts = g->state(s);
      if (g->product(ts.robot).task_accepting(ts.local, k)) {
        sol.allocation[k] = ts.robot;
        break;
      }
    }
  }
  return sol;
}

nlohmann::json StapuSolution::to_json() const {
  const auto& m = team->model();
  nlohmann::json j;
  j["value"] = value;
  j["team_states"] = m.num_states();
  j["team_full_size"] = team->full_size();
  j["allocation"] = nlohmann::json::array();
  for (const auto& a : allocation) j["allocation"].push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
  j["segments"] = nlohmann::json::array();
  for (const auto& seg : segments) {
    nlohmann::json sj;
    sj["robot"] = seg.robot;
    sj["entry"] = seg.entry ? product::to_json(team->product_state(*seg.entry)) : nlohmann::json(nullptr);
    sj["choices"] = nlohmann::json::array();
    for (const auto& [s, a] : seg.choices)
      sj["choices"].push_back({{"state", product::to_json(team->product_state(s))},
                               {"action", m.action_name(a)}});
    j["segments"].push_back(std::move(sj));
  }
  j["switches"] = switches;
  j["single_switch"] = check_single_switch(*this);
  if (!costs.empty()) j["expected_cost"] = costs[m.initial()];
  return j;
}

bool check_class(const mdp::Mdp& m) {
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices(s)) {
      if (c.outcomes.size() == 1) continue;
      if (c.outcomes.size() != 2) return false;
      const bool a = m.is_failure(c.outcomes[0].to), b = m.is_failure(c.outcomes[1].to);
      if (a == b) return false;
    }
  }
  return true;
}

bool check_single_switch(const StapuSolution& sol) {
  const auto& g = *sol.team;
  std::vector<int> count(g.num_robots(), 0);
  for (StateId s : reachable(g, sol.policy))
    if (!g.target()[s] && !g.avoid()[s] && sol.policy[s] == g.switch_action())
      if (++count[g.state(s).robot] > 1) return false;
  return true;
}

}  // namespace stapu::team
