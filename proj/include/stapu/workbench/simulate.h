#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "stapu/realloc/joint.h"

namespace stapu::workbench {

struct SimReport {
  long runs = 0;
  long successes = 0;
  double success_rate = 0.0;
  double std_error = 0.0;
  /// Runs that reached a reallocation point, addressed or not.
  double realloc_rate = 0.0;
  /// Runs that ended in a pending (unaddressed) point.
  double unaddressed_rate = 0.0;
  double mean_steps = 0.0;
  /// Runs cut off at max_steps; counted as failures.
  long truncated = 0;

  nlohmann::json to_json() const;
};

/// Seeded rollouts of the joint chain from its initial node.
SimReport simulate(const realloc::JointPolicy& jp, long runs, std::uint64_t seed,
                   long max_steps = 1000000);

}  // namespace stapu::workbench
