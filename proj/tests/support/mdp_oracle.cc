#include "support/mdp_oracle.h"

#include <algorithm>
#include <cmath>

namespace stapu::testing {

using mdp::Mdp;
using mdp::Outcome;
using mdp::StateSet;

// Kept deliberately naive so it shares nothing with the solver.
std::vector<double> chain_reach(const Mdp& m, const std::vector<int>& choice_index,
                                const StateSet& target, const StateSet& avoid) {
  const int n = m.num_states();
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (int s = 0; s < n; ++s) x[s] = target[s] ? 1.0 : 0.0;
  for (int it = 0; it < 1000000; ++it) {
    double d = 0.0;
    for (int s = 0; s < n; ++s) {
      if (target[s]) {
        y[s] = 1.0;
      } else if (avoid[s] || choice_index[s] < 0) {
        y[s] = 0.0;
      } else {
        double v = 0.0;
        for (const auto& o : m.choices(s)[choice_index[s]].outcomes) v += o.p * x[o.to];
        y[s] = v;
      }
      d = std::max(d, std::abs(y[s] - x[s]));
    }
    x.swap(y);
    if (d < 1e-15) break;
  }
  return x;
}

std::vector<double> enumerate_policies(const Mdp& m, const StateSet& target, const StateSet& avoid) {
  const int n = m.num_states();
  std::vector<int> idx(n, 0);
  for (int s = 0; s < n; ++s) idx[s] = m.choices(s).empty() ? -1 : 0;
  std::vector<double> best(n, 0.0);
  for (;;) {
    auto v = chain_reach(m, idx, target, avoid);
    for (int s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
    int s = 0;
    for (; s < n; ++s) {
      if (idx[s] < 0) continue;
      if (++idx[s] < static_cast<int>(m.choices(s).size())) break;
      idx[s] = 0;
    }
    if (s == n) break;
  }
  return best;
}

RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nstates(2, 6);
  const int n = nstates(rng);
  RandomInstance r{Mdp(n), StateSet(n, false), StateSet(n, false)};
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> nact(0, 2), nout(1, 3);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int s = 0; s < n; ++s) {
    const int k = nact(rng);
    for (int a = 0; a < k; ++a) {
      const int outs = nout(rng);
      std::vector<int> to;
      for (int i = 0; i < outs; ++i) {
        int t = pick(rng);
        if (std::find(to.begin(), to.end(), t) == to.end()) to.push_back(t);
      }
      std::vector<double> ws;
      double total = 0.0;
      for (std::size_t i = 0; i < to.size(); ++i) total += ws.emplace_back(w(rng));
      std::vector<Outcome> outcomes;
      for (std::size_t i = 0; i < to.size(); ++i) outcomes.push_back({to[i], ws[i] / total});
      r.m.add_choice(s, a == 0 ? "a" : "b", outcomes);
    }
  }
  r.target[pick(rng)] = true;
  const int av = pick(rng);
  if (!r.target[av] && std::bernoulli_distribution(0.5)(rng)) r.avoid[av] = true;
  return r;
}

}  // namespace stapu::testing
