#pragma once

#include <vector>

#include "sgpnet/network.hpp"

namespace sgpnet {

using Vec = std::vector<double>;
using Table = std::vector<Vec>;          // [task][node] or [task][link]
using RowTable = std::vector<Table>;     // [task][node][slot]

// Forwarding fractions. data[k][i] has 1 + degree(i) slots: slot 0 is the
// local CPU, slot s+1 is out_nbr[i][s]. result[k][i] has degree(i) slots and
// is all zero at the task's destination.
struct Strategy {
  RowTable data;
  RowTable result;

  static Strategy zeros(const NetworkSpec& spec, const TaskSet& tasks);
};

inline constexpr double kSnap = 1e-12;

// Zero out fractions below kSnap and renormalise each nonempty row.
void snap(Strategy& s);

struct FlowState {
  Table t_minus, t_plus, g;  // [task][node]
  Table f_minus, f_plus;     // [task][link]
  Vec F;                     // bits/s per link
  Vec G;                     // workload per node
  double T = 0.0;
};

struct LoopReport {
  std::vector<char> data_loop;    // per task
  std::vector<char> result_loop;  // per task
  bool loop_free() const;
};

LoopReport detect_loops(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s);

// Topological order of the support of rows (fractions > 0) for one task,
// upstream first. Throws LoopError on a cycle. `data` selects the data rows.
std::vector<int> support_order(const NetworkSpec& spec, const Strategy& s, int task, bool data);

FlowState propagate(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s);

// Aggregate F, G from per-task flows and evaluate T.
void aggregate(const NetworkSpec& spec, const TaskSet& tasks, FlowState& flow);
double total_cost(const NetworkSpec& spec, const FlowState& flow);

// Reference path: solves (I - Phi^T) t = r densely per task. Validation only.
FlowState propagate_dense(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s);

// Inverse mapping phi = f / t. Rows of nodes without traffic are copied from
// `fallback`.
Strategy strategy_from_flows(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow,
                             const Strategy& fallback);

// Largest flow-conservation residual over nodes and tasks, data and result.
double conservation_residual(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow);

}  // namespace sgpnet
