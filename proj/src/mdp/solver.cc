#include "stapu/mdp/solver.h"

#include <algorithm>
#include <cmath>

#include "stapu/errors.h"

namespace stapu::mdp {
namespace {

void check_sets(const Mdp& m, const StateSet& target, const StateSet& avoid) {
  const auto n = static_cast<std::size_t>(m.num_states());
  if (target.size() != n || avoid.size() != n)
    throw InputError("target/avoid sets do not match the number of states");
  for (std::size_t s = 0; s < n; ++s)
    if (target[s] && avoid[s]) throw InputError("target and avoid sets intersect");
}

std::vector<std::vector<StateId>> predecessors(const Mdp& m) {
  std::vector<std::vector<StateId>> pre(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s)
    for (const auto& c : m.choices(s))
      for (const auto& o : c.outcomes) pre[o.to].push_back(s);
  for (auto& p : pre) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return pre;
}

// Stops once successive sweeps differ by less than epsilon and the
// geometric tail implied by the observed contraction rate is also below
// epsilon, so slowly mixing chains do not stop early.
class Convergence {
 public:
  explicit Convergence(double epsilon) : eps_(epsilon) {}
  bool done(double delta) {
    const double prev = prev_;
    prev_ = delta;
    if (delta == 0.0) return true;
    if (delta >= eps_ || prev <= 0.0) return false;
    const double rate = delta / prev;
    if (rate >= 1.0) return false;
    return delta * rate / (1.0 - rate) < eps_;
  }

 private:
  double eps_;
  double prev_ = -1.0;
};

[[noreturn]] void diverged(int cap) {
  throw SolverError("value iteration did not converge within " + std::to_string(cap) +
                    " iterations");
}

// Layered attractor: each round assigns, to every state that still needs a
// decision, the lowest admissible action with a successor inside the region
// reached so far. Returns true when every state in `todo` got an action.
template <typename Admissible>
bool attract(const Mdp& m, const StateSet& seed, const std::vector<StateId>& todo,
             Admissible admissible, Policy& pi) {
  StateSet region = seed;
  std::vector<StateId> open = todo;
  while (!open.empty()) {
    std::vector<std::pair<StateId, ActionId>> layer;
    std::vector<StateId> rest;
    for (StateId s : open) {
      ActionId pick = kNoAction;
      for (const auto& c : m.choices(s)) {
        if (!admissible(s, c)) continue;
        bool hits = std::any_of(c.outcomes.begin(), c.outcomes.end(),
                                [&](const Outcome& o) { return region[o.to]; });
        if (hits) {
          pick = c.action;
          break;
        }
      }
      if (pick == kNoAction) {
        rest.push_back(s);
      } else {
        layer.emplace_back(s, pick);
      }
    }
    if (layer.empty()) return false;
    for (auto [s, a] : layer) {
      pi[s] = a;
      region[s] = true;
    }
    open.swap(rest);
  }
  return true;
}

ActionId lowest_action(const Mdp& m, StateId s) {
  const auto& cs = m.choices(s);
  return cs.empty() ? kNoAction : cs.front().action;
}

}  // namespace

double q_value(const Choice& c, const std::vector<double>& v) {
  double q = 0.0;
  for (const auto& o : c.outcomes) q += o.p * v[o.to];
  return q;
}

StateSet prob0(const Mdp& m, const StateSet& target, const StateSet& avoid) {
  check_sets(m, target, avoid);
  const int n = m.num_states();
  const auto pre = predecessors(m);
  StateSet reach(n, false);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s)
    if (target[s]) {
      reach[s] = true;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    StateId t = stack.back();
    stack.pop_back();
    for (StateId s : pre[t]) {
      if (reach[s] || avoid[s] || target[s]) continue;
      reach[s] = true;
      stack.push_back(s);
    }
  }
  StateSet zero(n);
  for (StateId s = 0; s < n; ++s) zero[s] = !reach[s];
  return zero;
}

StateSet prob1e(const Mdp& m, const StateSet& target, const StateSet& avoid) {
  const int n = m.num_states();
  const StateSet zero = prob0(m, target, avoid);
  StateSet u(n);
  for (StateId s = 0; s < n; ++s) u[s] = !zero[s] && !avoid[s];
  for (;;) {
    // Backward attractor of target restricted to actions that stay in u.
    StateSet r = target;
    bool grew = true;
    while (grew) {
      grew = false;
      for (StateId s = 0; s < n; ++s) {
        if (r[s] || !u[s]) continue;
        for (const auto& c : m.choices(s)) {
          bool inside = true, hits = false;
          for (const auto& o : c.outcomes) {
            inside = inside && u[o.to];
            hits = hits || r[o.to];
          }
          if (inside && hits) {
            r[s] = true;
            grew = true;
            break;
          }
        }
      }
    }
    if (r == u) return u;
    u = r;
  }
}

ReachResult max_reach(const Mdp& m, const StateSet& target, const StateSet& avoid,
                      const SolveOptions& opts) {
  check_sets(m, target, avoid);
  const int n = m.num_states();
  const StateSet zero = prob0(m, target, avoid);
  const StateSet one = prob1e(m, target, avoid);

  ReachResult r;
  r.value.assign(n, 0.0);
  std::vector<StateId> unknown;
  for (StateId s = 0; s < n; ++s) {
    if (target[s] || one[s]) {
      r.value[s] = 1.0;
    } else if (!zero[s]) {
      unknown.push_back(s);
    }
  }

  Convergence conv(opts.epsilon);
  for (;;) {
    if (r.iterations >= opts.max_iterations) diverged(opts.max_iterations);
    ++r.iterations;
    double delta = 0.0;
    for (StateId s : unknown) {
      double best = 0.0;
      for (const auto& c : m.choices(s)) best = std::max(best, q_value(c, r.value));
      best = std::min(best, 1.0);
      delta = std::max(delta, std::abs(best - r.value[s]));
      r.value[s] = best;
    }
    if (opts.on_iteration) opts.on_iteration(r.iterations, r.value);
    if (conv.done(delta)) break;
  }

  r.policy.assign(n, kNoAction);
  StateSet seed(n, false);
  std::vector<StateId> todo;
  for (StateId s = 0; s < n; ++s) {
    if (target[s] || avoid[s]) {
      seed[s] = true;
    } else if (zero[s]) {
      seed[s] = true;
      r.policy[s] = lowest_action(m, s);
    } else {
      todo.push_back(s);
    }
  }
  for (double tau = 1e-9;; tau *= 10) {
    Policy pi = r.policy;
    auto tight = [&](StateId s, const Choice& c) {
      return q_value(c, r.value) >= r.value[s] - tau;
    };
    if (attract(m, seed, todo, tight, pi) || tau >= 1.0) {
      for (StateId s : todo)
        if (pi[s] == kNoAction) pi[s] = lowest_action(m, s);
      r.policy = std::move(pi);
      break;
    }
  }
  return r;
}

NestedResult nested_vi(const Mdp& m, const StateSet& target, const StateSet& avoid,
                       const SolveOptions& opts) {
  ReachResult reach = max_reach(m, target, avoid, opts);
  const int n = m.num_states();
  NestedResult r;
  r.prob = reach.value;
  r.iterations = reach.iterations;

  // Cost is accumulated until the run is absorbed in target or in a state
  // that can no longer reach it.
  StateSet absorbing(n, false);
  std::vector<StateId> todo;
  for (StateId s = 0; s < n; ++s) {
    absorbing[s] = target[s] || avoid[s] || r.prob[s] <= 0.0;
    if (!absorbing[s]) todo.push_back(s);
  }

  std::vector<std::vector<const Choice*>> allowed(n);
  for (StateId s : todo) {
    for (const auto& c : m.choices(s)) {
      if (c.action == reach.policy[s] || q_value(c, r.prob) >= r.prob[s] - 1e-9)
        allowed[s].push_back(&c);
    }
  }

  // Cost of the probability-optimal proper policy, then improve downward.
  r.cost.assign(n, 0.0);
  auto sweep = [&](auto&& pick) {
    Convergence conv(opts.epsilon);
    for (;;) {
      if (r.iterations >= opts.max_iterations) diverged(opts.max_iterations);
      ++r.iterations;
      double delta = 0.0;
      for (StateId s : todo) {
        const double next = pick(s);
        delta = std::max(delta, std::abs(next - r.cost[s]));
        r.cost[s] = next;
      }
      if (conv.done(delta)) break;
    }
  };
  auto backup = [&](const Choice& c) {
    double v = c.cost;
    for (const auto& o : c.outcomes) v += o.p * r.cost[o.to];
    return v;
  };
  sweep([&](StateId s) { return backup(*m.find_choice(s, reach.policy[s])); });
  sweep([&](StateId s) {
    double best = r.cost[s];
    for (const Choice* c : allowed[s]) best = std::min(best, backup(*c));
    return best;
  });

  r.policy.assign(n, kNoAction);
  for (StateId s = 0; s < n; ++s)
    if (absorbing[s] && !target[s] && !avoid[s]) r.policy[s] = lowest_action(m, s);
  for (double tau = 1e-9;; tau *= 10) {
    Policy pi = r.policy;
    auto ok = [&](StateId s, const Choice& c) {
      if (std::find(allowed[s].begin(), allowed[s].end(), &c) == allowed[s].end()) return false;
      return backup(c) <= r.cost[s] + tau * std::max(1.0, r.cost[s]);
    };
    if (attract(m, absorbing, todo, ok, pi)) {
      r.policy = std::move(pi);
      break;
    }
    if (tau >= 1.0) {
      // Numerically degenerate: fall back to the probability-optimal policy.
      for (StateId s : todo) r.policy[s] = reach.policy[s];
      break;
    }
  }
  return r;
}

std::vector<double> policy_reach(const Mdp& m, const Policy& pi, const StateSet& target,
                                 const StateSet& avoid, const SolveOptions& opts) {
  check_sets(m, target, avoid);
  const int n = m.num_states();
  if (static_cast<int>(pi.size()) != n) throw InputError("policy size mismatch");
  std::vector<double> v(n, 0.0);
  std::vector<std::pair<StateId, const Choice*>> live;
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) {
      v[s] = 1.0;
    } else if (!avoid[s] && pi[s] != kNoAction) {
      const Choice* c = m.find_choice(s, pi[s]);
      if (!c) throw InputError("policy chooses an action not enabled in state " + std::to_string(s));
      live.emplace_back(s, c);
    }
  }
  Convergence conv(opts.epsilon);
  for (int it = 0;; ++it) {
    if (it >= opts.max_iterations) diverged(opts.max_iterations);
    double delta = 0.0;
    for (auto [s, c] : live) {
      const double next = q_value(*c, v);
      delta = std::max(delta, std::abs(next - v[s]));
      v[s] = next;
    }
    if (conv.done(delta)) break;
  }
  return v;
}

}  // namespace stapu::mdp
