#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sgpnet/marginals.hpp"

namespace sgpnet {

enum class Schedule { Synchronous, RoundRobinAsync, RandomAsync };
enum class Method { SGP, GP };

// Where the second-derivative bounds of the scaling matrix are evaluated.
// InitialCost: sup of D'' over {D <= T0}, T0 the starting cost. CurrentCost:
// the same with T0 replaced by the current cost. Local: D'' at the current
// flows (not a bound; the halving safeguard keeps descent).
enum class Curvature_mode { InitialCost, CurrentCost, Local };

// Server failure: the node loses its links, CPU, sources and destination role.
struct Event {
  int iter;
  int node;
};

struct RunConfig {
  int max_iters = 1000;
  double tol = 1e-6;
  Schedule schedule = Schedule::Synchronous;
  std::uint64_t seed = 1;  // RandomAsync only
  std::vector<Event> events;
  double gp_beta = 1.0;
  Method method = Method::SGP;
  Curvature_mode curvature = Curvature_mode::Local;
  bool check_invariants = true;
  // Restricted variants (SPOO, LCOR): slots marked 0 never receive flow and
  // are ignored by the stopping residual.
  std::optional<Mask> allowed_minus, allowed_plus;
};

struct TraceRecord {
  int iter;
  double T;
  double residual;
  int node;  // -1 for a synchronous sweep
  bool event;
  double wall_ms;
};

struct RunResult {
  NetworkSpec spec;  // differs from the input after a failure event
  TaskSet tasks;
  Strategy strategy;
  FlowState flow;
  std::vector<TraceRecord> trace;
  int iterations = 0;
  bool converged = false;
  double residual = kInf;
  bool monotone = true;   // T never rose outside event iterations
  bool loop_free = true;  // detect_loops passed after every update
};

// Curvature bounds at initial cost T0: per link sup D'' over D <= T0, per
// node sup C'' over C <= T0, and the maximum over all of them.
struct Curvature {
  Vec link;
  Vec cpu;
  double A = 0.0;
  // Flow-weighted curvature met downstream of each node per task, in task
  // flow units. When empty the hop count times A stands in for it.
  Table down_minus;
  Table down_plus;
};
Curvature curvature_bounds(const NetworkSpec& spec, double T0);
Curvature local_curvature(const NetworkSpec& spec, const FlowState& flow);
// Fills down_minus/down_plus by a downstream sweep over the current supports.
void add_downstream(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, Curvature& curv);

// Diagonal of the scaling matrix for one row, aligned with the row slots.
// Blocked slots get 0.
Vec scaling_matrix(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, const MarginalState& m,
                   const Curvature& curv, int task, int node, bool result);

// GP baseline scaling: (t/beta) on unblocked slots, 0 at the lowest-index argmin.
Vec gp_scaling(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, const MarginalState& m,
               int task, int node, bool result, double beta);

// argmin delta.(v-phi) + (v-phi)' diag(M) (v-phi) over the simplex with
// v = 0 on blocked slots. With M = 0 on every free slot the step falls back to
// a GP move of size gp_beta toward the lowest delta.
Vec simplex_qp(const Vec& phi, const Vec& delta, const Vec& M, const std::vector<char>& blocked, double gp_beta = 1.0);

// One safeguarded update of a single row.
Strategy sgp_step(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                  const MarginalState& m, const Curvature& curv, const RunConfig& cfg, int node, int task,
                  bool result);

struct RowUpdate {
  int task;
  int node;
  bool result;
  Vec row;
};

// Proposed rows for every (node, task) pair, ordered by node, data before
// result. Proposals that would close a loop are left out.
std::vector<RowUpdate> propose_all(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                   const FlowState& flow, const MarginalState& m, const Curvature& curv,
                                   const RunConfig& cfg);

RunResult run(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& init, const RunConfig& cfg);

// Loop-free start from zero-flow marginals: results on shortest-path trees,
// data either computed locally (local = true) or sent to the node with the
// cheapest compute-plus-return cost.
Strategy tree_strategy(const NetworkSpec& spec, const TaskSet& tasks, bool local);

// Local computation first, nearest-server routing second. If neither has finite
// cost, a rate homotopy searches for one. Throws InitError when that fails.
Strategy default_init(const NetworkSpec& spec, const TaskSet& tasks);

}  // namespace sgpnet
