#pragma once

#include <vector>

#include "sgpnet/flow.hpp"

namespace sgpnet {

using Mask = std::vector<std::vector<std::vector<char>>>;  // [task][node][slot]

struct Stage1 {
  Table dT_dtplus;
  std::vector<std::vector<int>> h_plus;
  std::vector<std::vector<char>> improper;
};

struct Stage2 {
  Table dT_dr;
  std::vector<std::vector<int>> h_minus;
  std::vector<std::vector<char>> improper;
};

struct MarginalState {
  Table dT_dr, dT_dtplus;
  RowTable delta_minus, delta_plus;  // aligned with Strategy rows
  std::vector<std::vector<int>> h_minus, h_plus;
  std::vector<std::vector<char>> improper_minus, improper_plus;
  Mask blocked_minus, blocked_plus;  // 1 where the slot may not gain flow
};

// Result-side sweep from each destination upstream. A node is tagged improper
// if some downstream support link (p,q) has dT/dt+_q >= dT/dt+_p.
Stage1 broadcast_stage1(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow);

// Data-side sweep; needs the result marginals for the CPU slot.
Stage2 broadcast_stage2(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                        const Stage1& st1);

// delta rows; the CPU slot of a node without a CPU is +inf.
void compute_deltas(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, MarginalState& m);

void compute_blocked(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, MarginalState& m);

// Both stages, deltas and blocked sets.
MarginalState compute_marginals(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                const FlowState& flow);

}  // namespace sgpnet
