#include "stapu/realloc/realloc.h"

#include <chrono>
#include <cmath>
#include <queue>

#include "stapu/errors.h"

namespace stapu::realloc {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

team::StapuSolution solve_realloc(ReallocPoint& point, const JointPolicy& jp,
                                  std::vector<product::ProductMdp> products,
                                  const team::SolveStapuOptions& opts,
                                  const team::TeamOptions& team_opts) {
  if (point.addressed) throw InputError("reallocation point already addressed");
  const auto& js = jp.node(point.node).state;
  const int n = static_cast<int>(products.size());
  if (n != jp.num_robots()) throw InputError("one product per robot required");
  std::vector<int> order;
  for (int k = 0; k < n; ++k) order.push_back((point.robot + k) % n);
  auto g = team::build_team(std::move(products), js.s, js.q, std::move(order), team_opts);
  auto sol = team::solve_stapu(std::move(g), opts);
  point.addressed = true;
  return sol;
}

nlohmann::json GuaranteeReport::to_json() const {
  nlohmann::json j;
  j["initial_value"] = initial_value;
  j["success"] = success;
  j["failure"] = failure;
  j["unaddressed"] = unaddressed;
  j["reallocations"] = reallocations;
  j["pending_points"] = pending_points;
  j["max_conservation_error"] = max_conservation_error;
  j["initial_solve_ms"] = initial_solve_ms;
  j["total_ms"] = total_ms;
  j["team_states"] = team_states;
  j["team_transitions"] = team_transitions;
  j["team_full_size"] = team_full_size;
  j["log"] = nlohmann::json::array();
  for (const auto& l : log) {
    j["log"].push_back({{"iteration", l.iteration},
                        {"node", l.node},
                        {"robot", l.robot},
                        {"point_probability", l.point_probability},
                        {"realloc_value", l.realloc_value},
                        {"success", l.success},
                        {"failure", l.failure},
                        {"unaddressed", l.unaddressed},
                        {"elapsed_ms", l.elapsed_ms}});
  }
  return j;
}

ReallocResult run_stapu_with_realloc(const std::vector<mdp::Mdp>& models,
                                     const logic::Mission& mission, const ReallocOptions& opts) {
  const auto t0 = Clock::now();
  if (models.empty()) throw InputError("no robot models");
  auto cm = std::make_shared<const logic::CompiledMission>(logic::CompiledMission::compile(mission));
  std::vector<product::ProductMdp> products;
  for (const auto& m : models)
    products.push_back(product::local_product(std::make_shared<const mdp::Mdp>(m), cm));

  auto team = std::make_shared<const team::TeamMdp>(team::build_team(products, opts.team));
  ReallocResult out{JointPolicy{}, GuaranteeReport{}, team::solve_stapu(team, opts.solve)};
  auto& rep = out.report;
  rep.initial_value = out.initial.value;
  rep.initial_solve_ms = ms_since(t0);
  rep.team_states = team->model().num_states();
  rep.team_transitions = team->model().num_transitions();
  rep.team_full_size = team->full_size();

  out.policy = synchronize(out.initial, opts.sync);
  auto& jp = out.policy;

  struct Entry {
    ReallocPoint point;
    std::size_t seq;
    bool operator<(const Entry& o) const {
      if (point.probability != o.point.probability) return point.probability < o.point.probability;
      return seq > o.seq;
    }
  };
  std::priority_queue<Entry> queue;
  std::size_t seq = 0;
  auto absorb = [&](const std::map<int, double>& masses) {
    for (auto [v, m] : masses) {
      const auto& node = jp.node(v);
      switch (node.kind) {
        case NodeKind::kSuccess: rep.success += m; break;
        case NodeKind::kFailure: rep.failure += m; break;
        case NodeKind::kPending:
          rep.unaddressed += m;
          if (m > 0.0) queue.push({{v, node.state.newly_failed, m, false}, seq++});
          break;
        default: break;
      }
    }
  };
  auto conservation = [&] {
    rep.max_conservation_error = std::max(
        rep.max_conservation_error, std::abs(rep.success + rep.failure + rep.unaddressed - 1.0));
  };
  absorb(propagate(jp, jp.initial(), 1.0));
  conservation();

  const auto loop_start = Clock::now();
  while (!queue.empty()) {
    if (opts.max_reallocations >= 0 && rep.reallocations >= opts.max_reallocations) break;
    if (opts.time_budget_s &&
        std::chrono::duration<double>(Clock::now() - loop_start).count() >= *opts.time_budget_s)
      break;
    Entry e = queue.top();
    queue.pop();
    auto sol = solve_realloc(e.point, jp, products, opts.solve, opts.team);
    const int root = graft(jp, e.point.node, sol, opts.sync);
    rep.unaddressed -= e.point.probability;
    absorb(propagate(jp, root, e.point.probability));
    ++rep.reallocations;
    conservation();
    IterationLog l{rep.reallocations, e.point.node, e.point.robot, e.point.probability, sol.value,
                   rep.success, rep.failure, rep.unaddressed, ms_since(t0)};
    rep.log.push_back(l);
    if (opts.on_iteration) opts.on_iteration(l);
  }
  rep.pending_points = static_cast<int>(queue.size());
  if (rep.pending_points == 0) rep.unaddressed = std::max(0.0, rep.unaddressed);
  rep.total_ms = ms_since(t0);
  return out;
}

}  // namespace stapu::realloc
