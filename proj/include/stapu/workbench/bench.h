#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stapu/baseline/mamdp.h"
#include "stapu/workbench/mapgen.h"

namespace stapu::workbench {

struct BenchConfig {
  std::vector<int> robots{2};
  std::vector<int> tasks{3};
  std::vector<int> failpoints{5};
  std::vector<std::uint64_t> seeds{1};
  int nodes = 30;
  int rows = 5;
  int cols = 6;
  double pfail_lo = 0.05;
  double pfail_hi = 0.3;
  int repetitions = 3;
  int max_reallocations = -1;
  bool mamdp = true;
  double ceiling = baseline::kDefaultCeiling;

  static BenchConfig from_json(const nlohmann::json& j);
};

struct BenchRow {
  int robots = 0;
  int tasks = 0;
  int failpoints = 0;
  std::uint64_t seed = 0;
  /// Full combinatorial team size.
  double team_states = 0.0;
  std::size_t team_trans = 0;
  double stapu_ms = 0.0;
  int reallocations = 0;
  double guarantee = 0.0;
  std::optional<double> mamdp_states;
  std::optional<std::size_t> mamdp_trans;
  std::optional<double> mamdp_ms;
  std::optional<double> mamdp_value;
};

inline constexpr const char* kCsvHeader =
    "robots,tasks,failpoints,seed,team_states,team_trans,stapu_ms,reallocations,guarantee,"
    "mamdp_states,mamdp_trans,mamdp_ms,mamdp_value";

/// One row per (robots, tasks, failpoints, seed) cell. A cell that throws
/// is reported through `on_error` and skipped.
std::vector<BenchRow> bench_sweep(
    const BenchConfig& cfg,
    const std::function<void(const BenchRow&, const std::string&)>& on_error = {});

BenchRow bench_cell(const BenchConfig& cfg, int robots, int tasks, int failpoints,
                    std::uint64_t seed);

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace stapu::workbench
