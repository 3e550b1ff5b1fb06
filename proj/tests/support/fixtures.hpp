#pragma once

#include <cstdint>
#include <functional>

#include "sgpnet/flow.hpp"
#include "sgpnet/network.hpp"

namespace fixtures {

using namespace sgpnet;

struct Instance {
  NetworkSpec spec;
  TaskSet tasks;
};

// Four nodes labelled 1..4 (ids 0..3). Direct link 1-4 costs 1 per unit, the
// chain 1-2-3-4 costs rho/3 per hop, and 2-4 costs 1. Only node 4 computes,
// at zero cost. One task to node 4 with unit rate at node 1. Results start at
// the destination, so their size never matters.
Instance detour(double rho);
// Everything goes straight to node 4: 1->4, 2->4, 3->4; node 4 computes.
Strategy detour_direct(const Instance& in);
// Everything follows the chain 1->2->3->4.
Strategy detour_chain(const Instance& in);

// Random connected instance with at most `max_nodes` nodes and `max_tasks`
// tasks. Link and CPU costs are a mix of Linear and Queue; queue capacities
// keep the local-compute start at or below 80% utilisation.
Instance random_small(std::uint64_t seed, int max_nodes = 6, int max_tasks = 2);

// dT/dr at (task, node) by central differences with the strategy held fixed.
double fd_dT_dr(const Instance& in, const Strategy& s, int task, int node, double h);
// dT/dt+ at (task, node): injects result traffic at the node and pushes it
// through the result rows with an independent dense solve.
double fd_dT_dtplus(const Instance& in, const Strategy& s, int task, int node, double h);

// Calls fn for every loop-free strategy whose rows lie on the simplex grid of
// the given step. Only meant for tiny graphs with one task.
void for_each_grid_strategy(const Instance& in, double step, const std::function<void(const Strategy&)>& fn);

}  // namespace fixtures
