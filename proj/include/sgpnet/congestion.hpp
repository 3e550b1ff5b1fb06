#pragma once

#include <vector>

#include "sgpnet/optimality.hpp"
#include "sgpnet/sgp.hpp"

namespace sgpnet {

// alpha-fair utility shifted so that U(0) = 0. epsilon offsets the argument
// for alpha >= 1 so that U'(0) stays finite.
struct UtilityFn {
  double alpha = 1.0;
  double epsilon = 1e-2;

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
};

// Admission gateway for the requests of one task entering at one node.
struct Gateway {
  int task;
  int node;
  double rbar;  // offered rate
  UtilityFn utility;
};

// The physical network plus one admit/reject gateway per (task, node) with a
// positive offered rate. Admitted requests enter the network as data; rejected
// ones reach the destination over a virtual link whose cost is the utility
// lost, U(rbar) - U(rbar - rejected).
struct ExtendedNetwork {
  NetworkSpec spec;
  TaskSet offered;  // rates are the offered rbar
  std::vector<Gateway> gateways;
};

// utility[task][node]; entries at nodes with rbar = 0 are ignored.
ExtendedNetwork build_extended(const NetworkSpec& spec, const TaskSet& tasks, const Table& rbar,
                               const std::vector<std::vector<UtilityFn>>& utility);
// Same utility at every gateway.
ExtendedNetwork build_extended(const NetworkSpec& spec, const TaskSet& tasks, const Table& rbar,
                               const UtilityFn& utility);

// Physical rows plus one (admit, reject) pair per gateway, in gateway order.
struct ExtStrategy {
  Strategy phys;
  std::vector<Vec> gate;
};

ExtStrategy all_reject(const ExtendedNetwork& ext);
std::vector<double> admitted(const ExtendedNetwork& ext, const ExtStrategy& s);
TaskSet admitted_tasks(const ExtendedNetwork& ext, const ExtStrategy& s);

// Network cost at the admitted rates plus the utility lost to rejection.
double extended_cost(const ExtendedNetwork& ext, const ExtStrategy& s);
// Utility of the admitted rates minus the network cost.
double net_utility(const ExtendedNetwork& ext, const ExtStrategy& s);

struct GateGap {
  int gateway;
  double gap;
};

struct CcReport {
  bool ok = true;
  double worst_virtual = 0.0;   // admission condition over gateways
  double worst_physical = 0.0;  // sufficient condition on the physical rows
  std::vector<GateGap> violating;
};

// Admit > 0 requires dT/dr <= U'(r) + tol; reject > 0 requires
// U'(r) <= dT/dr + tol. Physical rows must meet the sufficient condition at
// the admitted rates.
CcReport check_sufficient_cc(const ExtendedNetwork& ext, const ExtStrategy& s, double tol);

struct CcResult {
  ExtStrategy strategy;
  std::vector<double> rates;  // admitted rate per gateway
  std::vector<TraceRecord> trace;  // T holds the extended cost
  int iterations = 0;
  bool converged = false;
  double residual = kInf;
  bool monotone = true;
  bool loop_free = true;
};

// Synchronous scaled projection over physical and gateway rows. Events and
// asynchronous schedules in cfg are ignored.
CcResult run_sgp_cc(const ExtendedNetwork& ext, const ExtStrategy& init, const RunConfig& cfg);
CcResult run_sgp_cc(const ExtendedNetwork& ext, const RunConfig& cfg);

}  // namespace sgpnet
