#include "stapu/realloc/joint.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stapu/errors.h"

namespace stapu::realloc {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::kTransient: return "transient";
    case NodeKind::kSuccess: return "success";
    case NodeKind::kFailure: return "failure";
    case NodeKind::kPending: return "pending";
    case NodeKind::kGrafted: return "grafted";
  }
  return "?";
}

namespace {

NodeKind kind_from_string(const std::string& s) {
  for (auto k : {NodeKind::kTransient, NodeKind::kSuccess, NodeKind::kFailure, NodeKind::kPending,
                 NodeKind::kGrafted})
    if (s == to_string(k)) return k;
  throw InputError("unknown joint node kind '" + s + "'");
}

const char* status_name(RobotStatus s) {
  switch (s) {
    case RobotStatus::kExecuting: return "executing";
    case RobotStatus::kDone: return "done";
    case RobotStatus::kFailed: return "failed";
  }
  return "?";
}

RobotStatus status_from_string(const std::string& s) {
  for (auto k : {RobotStatus::kExecuting, RobotStatus::kDone, RobotStatus::kFailed})
    if (s == status_name(k)) return k;
  throw InputError("unknown robot status '" + s + "'");
}

}  // namespace

/// Expands the joint chain of one plan breadth first.
class ChainBuilder {
 public:
  ChainBuilder(JointPolicy& jp, const SyncOptions& opts) : jp_(jp), opts_(opts) {}

  int add_plan(std::shared_ptr<const team::StapuSolution> sol, const std::vector<StateId>& s,
               const std::vector<int>& q) {
    const auto& g = *sol->team;
    const int n = g.num_robots();
    if (jp_.robots_ == 0) {
      jp_.robots_ = n;
      for (int r = 0; r < n; ++r) jp_.action_names_.push_back(g.product(r).source().actions());
    }
    if (n != jp_.robots_) throw InputError("plan has a different number of robots");
    if (opts_.require_class) {
      for (int r = 0; r < n; ++r)
        if (!team::check_class(g.product(r).source()))
          throw UnsupportedModel("robot " + std::to_string(r) +
                                 " is not deterministic-or-fail; joint chain unsupported");
      if (!team::check_single_switch(*sol))
        throw UnsupportedModel("plan switches more than once per robot");
    }

    const int plan = static_cast<int>(jp_.plans_.size());
    jp_.plans_.push_back(sol);
    std::ostringstream summary;
    summary << "value=" << sol->value;
    jp_.plan_summaries_.push_back(summary.str());

    JointState root;
    root.plan = plan;
    root.s = s;
    root.q = q;
    root.local.assign(n, -1);
    root.status.assign(n, RobotStatus::kDone);
    for (int r = 0; r < n; ++r) {
      const auto& seg = sol->segments[r];
      if (g.product(r).source().is_failure(s[r])) {
        root.status[r] = RobotStatus::kFailed;
      } else if (seg.entry) {
        root.local[r] = g.state(*seg.entry).local;
        root.status[r] = RobotStatus::kExecuting;
      }
    }
    settle(root, root.status);
    root.newly_failed = -1;
    const std::size_t first = jp_.nodes_.size();
    const int id = intern(std::move(root));
    jp_.roots_.push_back(id);
    if (plan == 0) jp_.initial_ = id;
    expand(first);
    return id;
  }

  void mark_grafted(int node, int root) {
    auto& n = jp_.nodes_.at(node);
    n.kind = NodeKind::kGrafted;
    n.succ = {{root, 1.0}};
  }

 private:
  const team::StapuSolution& plan(int id) const { return *jp_.plans_[id]; }

  void settle(JointState& js, const std::vector<RobotStatus>& before) const {
    const auto& sol = plan(js.plan);
    const auto& g = *sol.team;
    js.newly_failed = -1;
    for (int r = 0; r < jp_.robots_; ++r) {
      if (js.status[r] != RobotStatus::kExecuting) continue;
      if (g.product(r).source().is_failure(js.s[r])) {
        js.status[r] = RobotStatus::kFailed;
        if (before[r] == RobotStatus::kExecuting && js.newly_failed < 0) js.newly_failed = r;
        continue;
      }
      const auto tid = g.find(r, js.local[r]);
      if (!tid) throw UnsupportedModel("robot " + std::to_string(r) + " left its planned segment");
      const ActionId a = sol.policy[*tid];
      if (g.target()[*tid] || g.avoid()[*tid] || a == mdp::kNoAction || a == g.switch_action() ||
          sol.values[*tid] <= 0.0)
        js.status[r] = RobotStatus::kDone;
    }
  }

  NodeKind classify(const JointState& js) const {
    const auto& cm = plan(js.plan).team->product(0).mission();
    if (cm.safety && !cm.safety->accepting(js.q.back())) return NodeKind::kFailure;
    bool complete = true;
    for (std::size_t k = 0; k < cm.tasks.size(); ++k) complete = complete && cm.tasks[k].accepting(js.q[k]);
    if (complete) return NodeKind::kSuccess;
    if (js.newly_failed >= 0) return NodeKind::kPending;
    if (std::none_of(js.status.begin(), js.status.end(),
                     [](RobotStatus s) { return s == RobotStatus::kExecuting; }))
      return NodeKind::kFailure;
    return NodeKind::kTransient;
  }

  int intern(JointState js) {
    auto it = jp_.index_.find(js);
    if (it != jp_.index_.end()) return it->second;
    const int id = static_cast<int>(jp_.nodes_.size());
    JointNode node;
    node.kind = classify(js);
    node.state = std::move(js);
    jp_.index_.emplace(node.state, id);
    jp_.nodes_.push_back(std::move(node));
    return id;
  }

  std::vector<int> advance(const JointState& js, const std::vector<StateId>& s) const {
    const auto& g = *plan(js.plan).team;
    const auto& cm = g.product(0).mission();
    std::vector<int> q = js.q;
    for (std::size_t c = 0; c < q.size(); ++c) {
      const auto& dfa = cm.component(c);
      logic::Letter letter = 0;
      for (int r = 0; r < jp_.robots_; ++r) letter |= dfa.letter_of(g.product(r).source().label_names(s[r]));
      q[c] = dfa.next(q[c], letter);
    }
    return q;
  }

  void expand(std::size_t first) {
    for (std::size_t i = first; i < jp_.nodes_.size(); ++i) {
      if (jp_.nodes_[i].kind != NodeKind::kTransient) continue;
      const JointState cur = jp_.nodes_[i].state;
      const auto& sol = plan(cur.plan);
      const auto& g = *sol.team;
      const int n = jp_.robots_;

      std::vector<ActionId> actions(n, kIdle);
      std::vector<const mdp::Choice*> choice(n, nullptr);
      for (int r = 0; r < n; ++r) {
        if (cur.status[r] != RobotStatus::kExecuting) continue;
        const StateId tid = *g.find(r, cur.local[r]);
        actions[r] = g.local_action(r, sol.policy[tid]);
        choice[r] = g.product(r).model().find_choice(cur.local[r], actions[r]);
      }

      std::vector<std::pair<int, double>> succ;
      std::vector<std::size_t> pick(n, 0);
      for (;;) {
        JointState next = cur;
        double p = 1.0;
        for (int r = 0; r < n; ++r) {
          if (!choice[r]) continue;
          const auto& o = choice[r]->outcomes[pick[r]];
          p *= o.p;
          next.local[r] = o.to;
          next.s[r] = g.product(r).state(o.to).s;
        }
        next.q = advance(cur, next.s);
        settle(next, cur.status);
        const int to = intern(std::move(next));
        succ.emplace_back(to, p);
        int r = 0;
        for (; r < n; ++r) {
          if (!choice[r]) continue;
          if (++pick[r] < choice[r]->outcomes.size()) break;
          pick[r] = 0;
        }
        if (r == n) break;
      }
      auto& node = jp_.nodes_[i];
      node.actions = std::move(actions);
      node.succ = std::move(succ);
    }
  }

  JointPolicy& jp_;
  const SyncOptions& opts_;
};

JointPolicy synchronize(const team::StapuSolution& sol, const SyncOptions& opts) {
  JointPolicy jp;
  const auto& g = *sol.team;
  std::vector<StateId> s;
  for (int r = 0; r < g.num_robots(); ++r) s.push_back(g.entry(r));
  ChainBuilder b(jp, opts);
  b.add_plan(std::make_shared<const team::StapuSolution>(sol), s, g.initial_q());
  return jp;
}

int graft(JointPolicy& jp, int node, const team::StapuSolution& sol, const SyncOptions& opts) {
  if (jp.node(node).kind != NodeKind::kPending) throw InputError("graft target is not a pending reallocation point");
  const JointState at = jp.node(node).state;
  ChainBuilder b(jp, opts);
  const int root = b.add_plan(std::make_shared<const team::StapuSolution>(sol), at.s, at.q);
  b.mark_grafted(node, root);
  return root;
}

std::map<int, double> propagate(const JointPolicy& jp, int root, double mass) {
  const auto& nodes = jp.nodes();
  // Sub-chain reachable from root, then a topological order if it is acyclic.
  std::vector<int> order;
  std::map<int, int> state;  // 1 = on stack, 2 = finished
  bool cyclic = false;
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  state[root] = 1;
  while (!stack.empty()) {
    auto& [v, k] = stack.back();
    if (k < nodes[v].succ.size()) {
      const int w = nodes[v].succ[k++].first;
      auto it = state.find(w);
      if (it == state.end()) {
        state[w] = 1;
        stack.emplace_back(w, 0);
      } else if (it->second == 1) {
        cyclic = true;
      }
    } else {
      state[v] = 2;
      order.push_back(v);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());

  std::map<int, double> absorbed;
  std::map<int, double> cur{{root, mass}};
  if (!cyclic) {
    for (int v : order) {
      const double m = cur[v];
      if (m == 0.0) continue;
      if (nodes[v].succ.empty()) {
        absorbed[v] += m;
      } else {
        for (auto [w, p] : nodes[v].succ) cur[w] += m * p;
      }
    }
    return absorbed;
  }
  for (int round = 0; round < 10000000; ++round) {
    std::map<int, double> next;
    double live = 0.0;
    for (auto [v, m] : cur) {
      if (nodes[v].succ.empty()) {
        absorbed[v] += m;
        continue;
      }
      for (auto [w, p] : nodes[v].succ) {
        next[w] += m * p;
        if (!nodes[w].succ.empty()) live += m * p;
      }
    }
    cur.swap(next);
    if (live < 1e-15 * std::max(mass, 1e-300)) {
      for (auto [v, m] : cur)
        if (nodes[v].succ.empty()) absorbed[v] += m;
      break;
    }
  }
  return absorbed;
}

std::vector<ReallocPoint> find_realloc_points(const JointPolicy& jp) {
  std::vector<ReallocPoint> out;
  for (auto [v, m] : propagate(jp, jp.initial(), 1.0)) {
    const auto& node = jp.node(v);
    if (node.kind == NodeKind::kPending && m > 0.0)
      out.push_back({v, node.state.newly_failed, m, false});
  }
  std::stable_sort(out.begin(), out.end(), [](const ReallocPoint& a, const ReallocPoint& b) {
    return a.probability > b.probability;
  });
  return out;
}

nlohmann::json JointPolicy::to_json() const {
  nlohmann::json j;
  j["robots"] = robots_;
  j["initial"] = initial_;
  j["plans"] = nlohmann::json::array();
  for (std::size_t p = 0; p < plans_.size(); ++p) {
    nlohmann::json pj;
    pj["id"] = p;
    pj["root"] = roots_[p];
    if (plans_[p]) {
      pj["value"] = plans_[p]->value;
      pj["allocation"] = plans_[p]->to_json()["allocation"];
    }
    j["plans"].push_back(std::move(pj));
  }
  j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    nlohmann::json nj;
    nj["id"] = i;
    nj["plan"] = n.state.plan;
    nj["kind"] = to_string(n.kind);
    nj["s"] = n.state.s;
    nj["q"] = n.state.q;
    nlohmann::json st = nlohmann::json::array();
    for (auto s : n.state.status) st.push_back(status_name(s));
    nj["status"] = st;
    if (n.state.newly_failed >= 0) nj["failed_robot"] = n.state.newly_failed;
    if (!n.actions.empty()) {
      nlohmann::json acts = nlohmann::json::array();
      for (int r = 0; r < robots_; ++r)
        acts.push_back(n.actions[r] == kIdle ? std::string("idle") : action_names_[r][n.actions[r]]);
      nj["actions"] = acts;
    }
    nj["succ"] = nlohmann::json::array();
    for (auto [w, p] : n.succ) nj["succ"].push_back({{"to", w}, {"p", p}});
    j["nodes"].push_back(std::move(nj));
  }
  return j;
}

JointPolicy JointPolicy::from_json(const nlohmann::json& j) {
  JointPolicy jp;
  try {
    jp.robots_ = j.at("robots").get<int>();
    jp.initial_ = j.at("initial").get<int>();
    const auto& nodes = j.at("nodes");
    for (const auto& nj : nodes) {
      JointNode n;
      n.kind = kind_from_string(nj.at("kind").get<std::string>());
      n.state.plan = nj.at("plan").get<int>();
      n.state.s = nj.at("s").get<std::vector<StateId>>();
      n.state.q = nj.at("q").get<std::vector<int>>();
      for (const auto& st : nj.at("status")) n.state.status.push_back(status_from_string(st.get<std::string>()));
      n.state.local.assign(n.state.s.size(), -1);
      n.state.newly_failed = nj.value("failed_robot", -1);
      double total = 0.0;
      for (const auto& e : nj.at("succ")) {
        const int to = e.at("to").get<int>();
        if (to < 0 || to >= static_cast<int>(nodes.size())) throw InputError("joint successor out of range");
        n.succ.emplace_back(to, e.at("p").get<double>());
        total += n.succ.back().second;
      }
      if (!n.succ.empty() && std::abs(total - 1.0) > 1e-9)
        throw InputError("joint node probabilities do not sum to 1");
      jp.nodes_.push_back(std::move(n));
    }
    for (const auto& pj : j.value("plans", nlohmann::json::array())) {
      jp.plans_.push_back(nullptr);
      jp.roots_.push_back(pj.at("root").get<int>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed joint policy json: ") + e.what());
  }
  if (jp.initial_ < 0 || jp.initial_ >= static_cast<int>(jp.nodes_.size()))
    throw InputError("joint policy initial node out of range");
  return jp;
}

}  // namespace stapu::realloc
