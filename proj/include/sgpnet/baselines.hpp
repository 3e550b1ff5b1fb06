#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgpnet/sgp.hpp"

namespace sgpnet {

struct BaselineResult {
  std::string name;
  std::optional<Strategy> strategy;  // absent when the flows are not representable loop-free
  FlowState flow;
  double T = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRecord> trace;
  double gap = 0.0;  // oracle only: final bound T - lower bound
};

// Unscaled gradient projection with step parameter cfg.gp_beta.
BaselineResult run_gp(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& init, RunConfig cfg);

// Routing frozen to zero-flow shortest paths; only the offloading split along
// each path is optimised.
BaselineResult run_spoo(const NetworkSpec& spec, const TaskSet& tasks, RunConfig cfg);

// All data computed at its source; only result routing is optimised.
BaselineResult run_lcor(const NetworkSpec& spec, const TaskSet& tasks, RunConfig cfg);

// Each data flow is computed whole at one site chosen by a capacity-aware
// min-cost assignment at zero-flow marginals; links and CPUs are capped at
// `saturation` of capacity. Results follow zero-flow shortest paths.
BaselineResult run_lpr(const NetworkSpec& spec, const TaskSet& tasks, double saturation = 0.7);

// Frank-Wolfe on the flow-domain convex program. Stops when the certified
// relative gap (T - best lower bound) / T drops below tol.
BaselineResult convex_oracle(const NetworkSpec& spec, const TaskSet& tasks, double tol = 1e-7,
                             int max_iters = 200000);

}  // namespace sgpnet
