#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgpnet/cost.hpp"

namespace sgpnet {

struct Link {
  int from;
  int to;
};

// Directed graph with per-link and per-node costs. Call finalize() after
// adding links; adjacency lists are kept sorted by neighbour id so that row
// slot k of a strategy maps to out_nbr[i][k].
struct NetworkSpec {
  int n = 0;
  std::vector<Link> links;
  std::vector<CostFn> link_cost;
  std::vector<std::optional<CostFn>> comp_cost;  // nullopt: node has no CPU
  std::vector<std::vector<double>> comp_weight;  // [node][type]
  std::vector<int> label;                        // original ids, kept across node removal

  std::vector<std::vector<int>> out_nbr;
  std::vector<std::vector<int>> out_link;
  std::vector<std::vector<int>> in_link;

  NetworkSpec() = default;
  NetworkSpec(int nodes, int types);

  void add_link(int i, int j, CostFn cost);
  void add_edge(int i, int j, CostFn cost) {
    add_link(i, j, cost);
    add_link(j, i, cost);
  }
  void finalize();

  int num_links() const { return static_cast<int>(links.size()); }
  int num_types() const { return comp_weight.empty() ? 0 : static_cast<int>(comp_weight[0].size()); }
  int degree(int i) const { return static_cast<int>(out_nbr[i].size()); }
  int link_index(int i, int j) const;
  // Position of j in out_nbr[i], or -1.
  int slot_of(int i, int j) const;
  bool has_cpu(int i) const { return comp_cost[i].has_value(); }
};

struct Task {
  int dest;
  int type;
};

struct TaskSet {
  std::vector<Task> tasks;
  std::vector<double> data_size;    // L-_m
  std::vector<double> result_size;  // L+_m
  std::vector<std::vector<double>> rate;  // [task][node]

  int size() const { return static_cast<int>(tasks.size()); }
  double data_len(int k) const { return data_size[tasks[k].type]; }
  double result_len(int k) const { return result_size[tasks[k].type]; }
  double total_rate() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport validate(const NetworkSpec& spec, const TaskSet& tasks);

// True if every node reaches every other node over the directed links.
bool strongly_connected(const NetworkSpec& spec);

// Copy of (spec, tasks) with node v deleted and the remaining ids compacted.
// Tasks destined to v are dropped; rates at v vanish. kept_task[k] gives the
// original index of surviving task k; node_map[old] is the new id or -1.
struct Reduced {
  NetworkSpec spec;
  TaskSet tasks;
  std::vector<int> node_map;
  std::vector<int> kept_task;
};
Reduced remove_node(const NetworkSpec& spec, const TaskSet& tasks, int v);

}  // namespace sgpnet
