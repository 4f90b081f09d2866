#include "stapu/workbench/bench.h"

#include <algorithm>
#include <chrono>
#include <iomanip>

#include "stapu/errors.h"
#include "stapu/realloc/realloc.h"

namespace stapu::workbench {
namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

template <class T>
void get_list(const nlohmann::json& j, const char* key, std::vector<T>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_array())
    out = j[key].get<std::vector<T>>();
  else
    out = {j[key].get<T>()};
}

BenchRow key(int robots, int tasks, int failpoints, std::uint64_t seed) {
  BenchRow r;
  r.robots = robots;
  r.tasks = tasks;
  r.failpoints = failpoints;
  r.seed = seed;
  return r;
}

}  // namespace

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  try {
    BenchConfig c;
    get_list(j, "robots", c.robots);
    get_list(j, "tasks", c.tasks);
    get_list(j, "failpoints", c.failpoints);
    get_list(j, "seeds", c.seeds);
    c.nodes = j.value("nodes", c.nodes);
    c.rows = j.value("rows", c.rows);
    c.cols = j.value("cols", c.cols);
    if (j.contains("pfail")) {
      if (j["pfail"].is_array()) {
        c.pfail_lo = j["pfail"].at(0).get<double>();
        c.pfail_hi = j["pfail"].at(1).get<double>();
      } else {
        c.pfail_lo = c.pfail_hi = j["pfail"].get<double>();
      }
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    c.max_reallocations = j.value("max_reallocations", c.max_reallocations);
    c.mamdp = j.value("mamdp", c.mamdp);
    c.ceiling = j.value("ceiling", c.ceiling);
    if (c.repetitions < 1) throw InputError("repetitions must be at least 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad bench config: ") + e.what());
  }
}

BenchRow bench_cell(const BenchConfig& cfg, int robots, int tasks, int failpoints,
                    std::uint64_t seed) {
  BenchRow row = key(robots, tasks, failpoints, seed);
  GenOptions g;
  g.nodes = cfg.nodes;
  g.rows = cfg.rows;
  g.cols = cfg.cols;
  g.failpoints = failpoints;
  g.pfail_lo = cfg.pfail_lo;
  g.pfail_hi = cfg.pfail_hi;
  g.tasks = tasks;
  g.robots = robots;
  g.seed = seed;
  const auto spec = random_spec(g);
  const auto models = gen_robots(spec);
  const auto mission = gen_mission(spec);

  realloc::ReallocOptions ro;
  ro.max_reallocations = cfg.max_reallocations;
  std::vector<double> times;
  for (int k = 0; k < cfg.repetitions; ++k) {
    auto res = realloc::run_stapu_with_realloc(models, mission, ro);
    times.push_back(res.report.total_ms);
    row.team_states = res.report.team_full_size;
    row.team_trans = res.report.team_transitions;
    row.reallocations = res.report.reallocations;
    row.guarantee = res.report.success;
  }
  row.stapu_ms = median(times);

  if (!cfg.mamdp) return row;
  const auto cm = logic::CompiledMission::compile(mission);
  const double full = baseline::mamdp_full_size(models, cm);
  if (full > cfg.ceiling) return row;
  times.clear();
  for (int k = 0; k < cfg.repetitions; ++k) {
    const auto t0 = Clock::now();
    auto mm = baseline::build_mamdp(models, mission, cfg.ceiling);
    auto sol = baseline::solve_mamdp(mm);
    times.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    row.mamdp_states = mm.full_size;
    row.mamdp_trans = mm.model.num_transitions();
    row.mamdp_value = sol.value;
  }
  row.mamdp_ms = median(times);
  return row;
}

std::vector<BenchRow> bench_sweep(const BenchConfig& cfg,
                                  const std::function<void(const BenchRow&, const std::string&)>& on_error) {
  std::vector<BenchRow> rows;
  for (int n : cfg.robots)
    for (int m : cfg.tasks)
      for (int f : cfg.failpoints)
        for (auto seed : cfg.seeds) {
          try {
            rows.push_back(bench_cell(cfg, n, m, f, seed));
          } catch (const std::exception& e) {
            if (on_error) on_error(key(n, m, f, seed), e.what());
          }
        }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kCsvHeader << '\n';
  const auto flags = out.flags();
  const auto prec = out.precision();
  for (const auto& r : rows) {
    out << std::setprecision(12) << r.robots << ',' << r.tasks << ',' << r.failpoints << ',' << r.seed
        << ',' << r.team_states << ',' << r.team_trans << ',' << std::fixed << std::setprecision(3)
        << r.stapu_ms << std::defaultfloat << std::setprecision(12) << ',' << r.reallocations << ','
        << r.guarantee << ',';
    if (r.mamdp_states) out << *r.mamdp_states;
    out << ',';
    if (r.mamdp_trans) out << *r.mamdp_trans;
    out << ',';
    if (r.mamdp_ms) out << std::fixed << std::setprecision(3) << *r.mamdp_ms << std::defaultfloat << std::setprecision(12);
    out << ',';
    if (r.mamdp_value) out << *r.mamdp_value;
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace stapu::workbench
