#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgpnet/flow.hpp"

namespace sgpnet {

// Counter-based generator: the k-th draw of stream s under seed x is
// splitmix64_mix(x * 0x9E3779B97F4A7C15 ^ s * 0xD1B54A32D192ED03 + (k+1) * 0x9E3779B97F4A7C15).
// Doubles take the top 53 bits; all transforms below are written out here so
// results do not depend on the standard library's distribution classes.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double exponential(double mean);
  double truncated_exponential(double mean, double lo, double hi);
  int below(int n);  // uniform integer in [0, n)

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

enum class TopologyKind { ConnectedER, BalancedTree, Fog, Abilene, LHC, GEANT, SmallWorld };

struct ScenarioPreset {
  std::string name;
  TopologyKind topology;
  int nodes;
  int edges;  // undirected
  int tasks;
  int sources;  // R, sources per task
  CostFn::Kind link_kind;
  double link_mean;  // d-bar
  CostFn::Kind comp_kind;
  double comp_mean;  // s-bar
  int types = 5;
  double r_min = 0.5;
  double r_max = 1.5;
};

const std::vector<ScenarioPreset>& table2_presets();
const ScenarioPreset& find_preset(const std::string& name);  // throws ParamError

struct Topology {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, i < j
};

// Plain-text edge list: optional '#' comment lines, a node-count line, then
// one "i j" pair per line.
Topology parse_edge_list(const std::string& text);

// edges <= 0 lets ConnectedER draw each non-chain pair with p = 0.1.
Topology gen_topology(TopologyKind kind, int nodes, int edges, std::uint64_t seed);

struct Instance {
  NetworkSpec spec;
  TaskSet tasks;
  Strategy init;     // the finite-cost start found while sampling
  int attempts = 1;  // parameter draws until a finite-cost start existed
};

// Throws InitError if 100 parameter draws all lack a finite-cost start.
Instance sample_instance(const ScenarioPreset& preset, std::uint64_t seed);

}  // namespace sgpnet
