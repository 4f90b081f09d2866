#include "stapu/workbench/simulate.h"

#include <cmath>
#include <random>

namespace stapu::workbench {

using realloc::NodeKind;

nlohmann::json SimReport::to_json() const {
  return {{"runs", runs},
          {"successes", successes},
          {"success_rate", success_rate},
          {"std_error", std_error},
          {"realloc_rate", realloc_rate},
          {"unaddressed_rate", unaddressed_rate},
          {"mean_steps", mean_steps},
          {"truncated", truncated}};
}

SimReport simulate(const realloc::JointPolicy& jp, long runs, std::uint64_t seed, long max_steps) {
  SimReport rep;
  rep.runs = runs;
  if (runs <= 0 || jp.nodes().empty()) return rep;
  std::vector<std::discrete_distribution<std::size_t>> pick;
  for (const auto& n : jp.nodes()) {
    std::vector<double> w;
    for (auto [to, p] : n.succ) w.push_back(p);
    pick.emplace_back(w.begin(), w.end());
  }
  std::mt19937_64 rng(seed);
  long realloc_runs = 0, unaddressed = 0;
  double steps = 0.0;
  for (long k = 0; k < runs; ++k) {
    int v = jp.initial();
    bool realloc_hit = false;
    long t = 0;
    for (;; ++t) {
      const auto& node = jp.node(v);
      if (node.kind == NodeKind::kPending || node.kind == NodeKind::kGrafted) realloc_hit = true;
      if (node.succ.empty()) break;
      if (t >= max_steps) {
        ++rep.truncated;
        break;
      }
      v = node.succ[pick[v](rng)].first;
    }
    steps += static_cast<double>(t);
    const auto kind = jp.node(v).kind;
    if (kind == NodeKind::kSuccess) ++rep.successes;
    if (kind == NodeKind::kPending) ++unaddressed;
    if (realloc_hit) ++realloc_runs;
  }
  const double n = static_cast<double>(runs);
  rep.success_rate = static_cast<double>(rep.successes) / n;
  rep.std_error = std::sqrt(rep.success_rate * (1.0 - rep.success_rate) / n);
  rep.realloc_rate = static_cast<double>(realloc_runs) / n;
  rep.unaddressed_rate = static_cast<double>(unaddressed) / n;
  rep.mean_steps = steps / n;
  return rep;
}

}  // namespace stapu::workbench
