#pragma once

#include <vector>

#include "sgpnet/marginals.hpp"

namespace sgpnet {

struct GapEntry {
  int node;
  int task;
  bool result;  // false: data row, true: result row
  int slot;     // row slot; data slot 0 is the CPU
  double gap;
};

struct OptimalityReport {
  bool kkt_ok = true;
  bool sufficient_ok = true;
  double worst_violation = 0.0;  // of the condition that was checked
  std::vector<GapEntry> violating_entries;
};

inline constexpr double kDefaultTol = 1e-6;

// Necessary condition: support entries of t*delta sit at the row minimum.
OptimalityReport check_kkt(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                           const MarginalState& m, double tol = kDefaultTol);

// Sufficient condition: support entries of delta sit at the row minimum, at
// every node regardless of traffic.
OptimalityReport check_sufficient(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                  const MarginalState& m, double tol = kDefaultTol);

// Largest delta gap on any support entry. `allowed` (optional) restricts the
// rows and slots that are considered, for restricted baselines.
double sufficient_residual(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const MarginalState& m,
                           const Mask* allowed_minus = nullptr, const Mask* allowed_plus = nullptr);

struct GeodesicReport {
  int samples = 0;
  double max_violation = 0.0;  // largest T(mid) - (T(a)+T(b))/2 over sample pairs
  std::vector<double> costs;
};

// Walks the flow-domain segment between two strategies, maps each point back
// to a strategy and checks midpoint convexity of T. Throws DegenerateError if
// a node with zero traffic has different rows in the two endpoints, or if a
// point on the segment maps to a strategy with a forwarding loop.
GeodesicReport geodesic_probe(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& phi1,
                              const Strategy& phi2, int samples);

}  // namespace sgpnet
