#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stapu/baseline/mamdp.h"
#include "stapu/errors.h"
#include "stapu/logic/dfa.h"
#include "stapu/logic/parser.h"
#include "stapu/realloc/realloc.h"
#include "stapu/workbench/bench.h"
#include "stapu/workbench/simulate.h"

using namespace stapu;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 1, kSolver = 2, kCeiling = 3 };

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text << '\n';
}

std::vector<mdp::Mdp> read_models(const std::vector<std::string>& paths) {
  std::vector<mdp::Mdp> out;
  for (const auto& p : paths) out.push_back(mdp::from_json(read_json(p)));
  return out;
}

logic::Mission read_mission(const std::string& path) {
  auto m = logic::Mission::from_json(read_json(path));
  for (const auto& d : logic::validate_mission_decomposition(m)) std::cerr << "warning: " << d.message << '\n';
  return m;
}

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind(".json");
  return dot != std::string::npos && dot + 5 == path.size() ? path.substr(0, dot) : path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task allocation and planning under uncertainty for robot teams"};
  app.require_subcommand(1);

  std::string formula, out, mission_path, policy_path, config_path, csv_path, mission_out, spec_out;
  std::vector<std::string> model_paths;
  double epsilon = 1e-6, ceiling = baseline::kDefaultCeiling, pfail = 0.1;
  std::optional<double> time_budget;
  int max_realloc = -1, nodes = 30, rows = 0, cols = 0, failpoints = 5, tasks = 3, hazards = 0, robots = 1;
  long runs = 100000;
  std::uint64_t seed = 0;
  bool close_ring = false;

  auto* compile = app.add_subcommand("compile", "Compile an LTL formula to a minimal DFA (JSON)");
  compile->add_option("--formula", formula, "Co-safe or safe LTL formula")->required();
  compile->add_option("--out", out, "Output file (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "Solve the initial team problem");
  solve->add_option("--models", model_paths, "One model file per robot")->required();
  solve->add_option("--mission", mission_path, "Mission file")->required();
  solve->add_option("--epsilon", epsilon, "Value iteration threshold");
  solve->add_flag("--close-ring", close_ring, "Add a switch from the last robot back to the first");
  solve->add_option("--out", out, "Output file (stdout if omitted)");

  auto* realloc_cmd = app.add_subcommand("realloc", "Solve with reallocation and write the joint policy");
  realloc_cmd->add_option("--models", model_paths, "One model file per robot")->required();
  realloc_cmd->add_option("--mission", mission_path, "Mission file")->required();
  realloc_cmd->add_option("--max-realloc", max_realloc, "Reallocation budget, negative for none");
  realloc_cmd->add_option("--time-budget", time_budget, "Wall-clock budget for the loop in seconds");
  realloc_cmd->add_option("--epsilon", epsilon, "Value iteration threshold");
  realloc_cmd->add_option("--out", out, "Joint policy output file (stdout if omitted)");

  auto* base = app.add_subcommand("baseline", "Build and solve the full joint model");
  base->add_option("--models", model_paths, "One model file per robot")->required();
  base->add_option("--mission", mission_path, "Mission file")->required();
  base->add_option("--ceiling", ceiling, "Refuse models whose full size exceeds this");
  base->add_option("--epsilon", epsilon, "Value iteration threshold");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo rollouts of a joint policy");
  sim->add_option("--policy", policy_path, "Joint policy file written by realloc")->required();
  sim->add_option("--runs", runs, "Number of rollouts");
  sim->add_option("--seed", seed, "Random seed");

  auto* genmap = app.add_subcommand("genmap", "Generate a seeded topological map model");
  genmap->add_option("--nodes", nodes, "Node count (30 gives the 5x6 grid)");
  genmap->add_option("--rows", rows, "Grid rows");
  genmap->add_option("--cols", cols, "Grid columns");
  genmap->add_option("--failpoints", failpoints, "Number of failure points");
  genmap->add_option("--pfail", pfail, "Failure probability at each failure point");
  genmap->add_option("--tasks", tasks, "Number of task atoms");
  genmap->add_option("--hazards", hazards, "Number of hazard atoms for the safety formula");
  genmap->add_option("--robots", robots, "Robots; with more than one, writes <out>_r<i>.json");
  genmap->add_option("--seed", seed, "Random seed");
  genmap->add_option("--out", out, "Model output file")->required();
  genmap->add_option("--mission-out", mission_out, "Also write the matching mission file");
  genmap->add_option("--spec-out", spec_out, "Also write the map specification");

  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  bench->add_option("--config", config_path, "Sweep configuration (JSON)")->required();
  bench->add_option("--csv", csv_path, "CSV output file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      const auto f = logic::parse(formula);
      const auto d = logic::minimize(logic::compile(f));
      auto j = d.to_json();
      j["formula"] = f.to_string();
      j["fragment"] = std::string(logic::to_string(logic::classify(f)));
      write_text(out, j.dump(2));
    } else if (*solve) {
      const auto models = read_models(model_paths);
      const auto mission = read_mission(mission_path);
      auto cm = std::make_shared<const logic::CompiledMission>(logic::CompiledMission::compile(mission));
      std::vector<product::ProductMdp> products;
      for (const auto& m : models) products.push_back(product::local_product(std::make_shared<const mdp::Mdp>(m), cm));
      team::TeamOptions to;
      to.close_ring = close_ring;
      team::SolveStapuOptions so;
      so.vi.epsilon = epsilon;
      write_text(out, team::solve_stapu(team::build_team(std::move(products), to), so).to_json().dump(2));
    } else if (*realloc_cmd) {
      realloc::ReallocOptions ro;
      ro.max_reallocations = max_realloc;
      ro.time_budget_s = time_budget;
      ro.solve.vi.epsilon = epsilon;
      auto res = realloc::run_stapu_with_realloc(read_models(model_paths), read_mission(mission_path), ro);
      auto j = res.policy.to_json();
      j["report"] = res.report.to_json();
      write_text(out, j.dump(2));
      if (!out.empty() && out != "-") std::cout << res.report.to_json().dump(2) << '\n';
    } else if (*base) {
      const auto models = read_models(model_paths);
      const auto mission = read_mission(mission_path);
      const auto mm = baseline::build_mamdp(models, mission, ceiling);
      mdp::SolveOptions so;
      so.epsilon = epsilon;
      const auto sol = baseline::solve_mamdp(mm, so);
      std::cout << json{{"value", sol.value},
                        {"iterations", sol.iterations},
                        {"states", mm.model.num_states()},
                        {"transitions", mm.model.num_transitions()},
                        {"full_size", mm.full_size}}
                       .dump(2)
                << '\n';
    } else if (*sim) {
      const auto jp = realloc::JointPolicy::from_json(read_json(policy_path));
      std::cout << workbench::simulate(jp, runs, seed).to_json().dump(2) << '\n';
    } else if (*genmap) {
      workbench::GenOptions o;
      o.nodes = nodes;
      if (rows > 0 || cols > 0) {
        o.rows = rows;
        o.cols = cols;
      } else if (nodes != o.rows * o.cols) {
        o.rows = o.cols = 0;
      }
      o.failpoints = failpoints;
      o.pfail_lo = o.pfail_hi = pfail;
      o.tasks = tasks;
      o.hazards = hazards;
      o.robots = robots;
      o.seed = seed;
      const auto spec = workbench::random_spec(o);
      const auto models = workbench::gen_robots(spec);
      if (robots == 1) {
        write_text(out, mdp::to_json(models[0]).dump(2));
      } else {
        for (int r = 0; r < robots; ++r) {
          const auto path = stem_of(out) + "_r" + std::to_string(r) + ".json";
          write_text(path, mdp::to_json(models[r]).dump(2));
          std::cout << path << '\n';
        }
      }
      if (!mission_out.empty()) write_text(mission_out, workbench::gen_mission(spec).to_json().dump(2));
      if (!spec_out.empty()) write_text(spec_out, spec.to_json().dump(2));
    } else if (*bench) {
      const auto cfg = workbench::BenchConfig::from_json(read_json(config_path));
      const auto rows_out = workbench::bench_sweep(cfg, [](const workbench::BenchRow& r, const std::string& msg) {
        std::cerr << "cell robots=" << r.robots << " tasks=" << r.tasks << " failpoints=" << r.failpoints
                  << " seed=" << r.seed << " failed: " << msg << '\n';
      });
      if (csv_path.empty()) {
        workbench::write_csv(std::cout, rows_out);
      } else {
        std::ofstream csv(csv_path);
        if (!csv) throw InputError("cannot write " + csv_path);
        workbench::write_csv(csv, rows_out);
      }
    }
  } catch (const CeilingExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCeiling;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const UnsupportedModel& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
