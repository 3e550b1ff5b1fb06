#pragma once

#include <vector>

#include "sgpnet/flow.hpp"

namespace sgpnet {

// Shortest-path forest toward terminals. Every node starts with `label`
// (kInf if it is not a terminal) and may instead reach a neighbour j at cost
// weight[link(i,j)] + dist[j]. next[i] is that neighbour, or -1 if the node
// keeps its own label. Ties keep the earlier (lower-id) choice.
struct PathTree {
  Vec dist;
  std::vector<int> next;
};

PathTree shortest_tree(const NetworkSpec& spec, const Vec& label, const Vec& weight);

// Tree toward a single destination.
PathTree tree_to(const NetworkSpec& spec, int dest, const Vec& weight);

// D'_ij(0) per link.
Vec zero_flow_slopes(const NetworkSpec& spec);

// w_im C'_i(0) per node for type m, kInf without a CPU.
Vec zero_flow_cpu(const NetworkSpec& spec, int type);

}  // namespace sgpnet
