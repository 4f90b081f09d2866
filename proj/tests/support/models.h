#pragma once

#include <random>
#include <string>
#include <vector>

#include "stapu/mdp/mdp.h"

namespace stapu::testing {

/// Random labeled MDP with 2..max_states states, up to two actions per
/// state and up to three successors per action. Each atom labels each state
/// independently with probability 0.3.
mdp::Mdp random_labeled_mdp(std::mt19937_64& rng, int max_states,
                            const std::vector<std::string>& atoms);

/// Line graph 0-1-...-(n-1) with move actions both ways plus a designated
/// failure state n. Nodes in `fail` lose the robot with probability pfail
/// on every move out of them.
mdp::Mdp corridor(int n, const std::vector<int>& fail, double pfail);

/// Random connected graph on `nodes` nodes (spanning tree plus a few extra
/// edges), deterministic moves except out of `failpoints` randomly chosen
/// nodes other than `start`, which fail with a probability drawn from
/// [0.05, 0.4]. Failure state is `nodes`.
mdp::Mdp random_map(std::mt19937_64& rng, int nodes, int failpoints, int start = 0);

}  // namespace stapu::testing
