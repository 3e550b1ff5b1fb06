#include "sgpnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sgpnet/errors.hpp"
#include "sgpnet/flow.hpp"
#include "sgpnet/sgp.hpp"
#include "topologies_embedded.hpp"

namespace sgpnet {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kTopology = 1, kLinks = 2, kCpus = 3, kTasks = 4 };
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : base_(seed * kGolden ^ stream * 0xD1B54A32D192ED03ull) {}

std::uint64_t Rng::next() { return mix(base_ + (++counter_) * kGolden); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform()); }

double Rng::truncated_exponential(double mean, double lo, double hi) {
  const double a = -std::expm1(-lo / mean), b = -std::expm1(-hi / mean);
  const double u = a + (b - a) * uniform();
  return std::clamp(-mean * std::log1p(-u), lo, hi);
}

int Rng::below(int n) { return static_cast<int>(uniform() * n); }

const std::vector<ScenarioPreset>& table2_presets() {
  using K = CostFn::Kind;
  static const std::vector<ScenarioPreset> presets = {
      {"Connected-ER", TopologyKind::ConnectedER, 20, 40, 15, 5, K::Queue, 10, K::Queue, 12},
      {"Balanced-tree", TopologyKind::BalancedTree, 15, 14, 20, 5, K::Queue, 20, K::Queue, 15},
      {"Fog", TopologyKind::Fog, 19, 30, 30, 5, K::Queue, 20, K::Queue, 17},
      {"Abilene", TopologyKind::Abilene, 11, 14, 10, 3, K::Queue, 15, K::Queue, 10},
      {"LHC", TopologyKind::LHC, 16, 31, 30, 5, K::Queue, 15, K::Queue, 15},
      {"GEANT", TopologyKind::GEANT, 22, 33, 40, 7, K::Queue, 20, K::Queue, 20},
      {"SW-linear", TopologyKind::SmallWorld, 100, 320, 120, 10, K::Linear, 20, K::Linear, 20},
      {"SW-queue", TopologyKind::SmallWorld, 100, 320, 120, 10, K::Queue, 20, K::Queue, 20},
  };
  return presets;
}

const ScenarioPreset& find_preset(const std::string& name) {
  for (const auto& p : table2_presets())
    if (p.name == name) return p;
  throw ParamError("unknown scenario preset '" + name + "'");
}

Topology parse_edge_list(const std::string& text) {
  Topology t;
  std::istringstream in(text);
  std::string line;
  bool have_n = false;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    if (!have_n) {
      if (!(ls >> t.n) || t.n <= 0) throw ParamError("edge list: bad node count line");
      have_n = true;
      continue;
    }
    int a, b;
    if (!(ls >> a >> b)) throw ParamError("edge list: malformed line '" + line + "'");
    if (a < 0 || b < 0 || a >= t.n || b >= t.n || a == b) throw ParamError("edge list: bad pair '" + line + "'");
    t.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  if (!have_n) throw ParamError("edge list: missing node count");
  return t;
}

namespace {

struct EdgeSet {
  std::set<std::pair<int, int>> s;
  bool add(int a, int b) { return a != b && s.insert({std::min(a, b), std::max(a, b)}).second; }
  bool has(int a, int b) const { return s.count({std::min(a, b), std::max(a, b)}) > 0; }
};

Topology finish(int n, const EdgeSet& es) {
  Topology t;
  t.n = n;
  t.edges.assign(es.s.begin(), es.s.end());
  return t;
}

// Adds `count` uniformly chosen pairs that are not yet edges.
void add_random_pairs(int n, int count, EdgeSet& es, Rng& rng) {
  std::vector<std::pair<int, int>> free;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!es.has(a, b)) free.push_back({a, b});
  if (count > static_cast<int>(free.size())) throw ParamError("edge budget exceeds the complete graph");
  for (int c = 0; c < count; ++c) {
    const int pick = c + rng.below(static_cast<int>(free.size()) - c);
    std::swap(free[c], free[pick]);
    es.add(free[c].first, free[c].second);
  }
}

Topology fixed(const char* text, int nodes, int edges) {
  Topology t = parse_edge_list(text);
  if ((nodes > 0 && t.n != nodes) || (edges > 0 && static_cast<int>(t.edges.size()) != edges))
    throw ParamError("fixed topology does not match the requested size");
  return t;
}

}  // namespace

Topology gen_topology(TopologyKind kind, int n, int edges, std::uint64_t seed) {
  Rng rng(seed, kTopology);
  EdgeSet es;
  switch (kind) {
    case TopologyKind::ConnectedER: {
      if (n < 2) throw ParamError("ConnectedER needs at least 2 nodes");
      for (int i = 0; i + 1 < n; ++i) es.add(i, i + 1);
      if (edges <= 0) {
        for (int a = 0; a < n; ++a)
          for (int b = a + 2; b < n; ++b)
            if (rng.uniform() < 0.1) es.add(a, b);
      } else {
        if (edges < n - 1) throw ParamError("ConnectedER edge budget below the chain");
        add_random_pairs(n, edges - (n - 1), es, rng);
      }
      return finish(n, es);
    }
    case TopologyKind::BalancedTree: {
      if (n < 1 || (edges > 0 && edges != n - 1)) throw ParamError("a tree on n nodes has n-1 edges");
      for (int i = 1; i < n; ++i) es.add(i, (i - 1) / 2);
      return finish(n, es);
    }
    case TopologyKind::Fog: {
      for (int i = 1; i < n; ++i) es.add(i, (i - 1) / 2);
      // Chain the nodes of each layer, root side first, until the budget is met.
      for (int first = 1; first < n && static_cast<int>(es.s.size()) < edges; first = 2 * first + 1)
        for (int i = first; i + 1 < std::min(2 * first + 1, n) && static_cast<int>(es.s.size()) < edges; ++i)
          es.add(i, i + 1);
      if (edges > 0 && static_cast<int>(es.s.size()) != edges) throw ParamError("Fog edge budget out of range");
      return finish(n, es);
    }
    case TopologyKind::SmallWorld: {
      if (n < 5) throw ParamError("SmallWorld needs at least 5 nodes");
      for (int i = 0; i < n; ++i) es.add(i, (i + 1) % n);
      for (int i = 0; i < n && static_cast<int>(es.s.size()) < edges; ++i) es.add(i, (i + 2) % n);
      if (edges < n) throw ParamError("SmallWorld edge budget below the ring");
      add_random_pairs(n, edges - static_cast<int>(es.s.size()), es, rng);
      return finish(n, es);
    }
    case TopologyKind::Abilene:
      return fixed(embedded::kAbilene, n, edges);
    case TopologyKind::LHC:
      return fixed(embedded::kLhc, n, edges);
    case TopologyKind::GEANT:
      return fixed(embedded::kGeant, n, edges);
  }
  throw ParamError("unknown topology kind");
}

Instance sample_instance(const ScenarioPreset& p, std::uint64_t seed) {
  const Topology topo = gen_topology(p.topology, p.nodes, p.edges, seed);
  if (p.tasks > topo.n * p.types) throw ParamError("more tasks than (destination, type) pairs");
  if (p.sources > topo.n) throw ParamError("more sources than nodes");

  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t s = seed + 0x10000ull * attempt;
    Rng links(s, kLinks), cpus(s, kCpus), tk(s, kTasks);
    auto draw = [](Rng& r, CostFn::Kind kind, double mean) {
      return kind == CostFn::Kind::Queue ? CostFn::queue(r.uniform(0.0, 2.0 * mean))
                                         : CostFn::linear(r.uniform(0.0, 2.0 * mean));
    };

    NetworkSpec spec(topo.n, p.types);
    for (const auto& [a, b] : topo.edges) {
      spec.add_link(a, b, draw(links, p.link_kind, p.link_mean));
      spec.add_link(b, a, draw(links, p.link_kind, p.link_mean));
    }
    for (int i = 0; i < topo.n; ++i) {
      spec.comp_cost[i] = p.comp_kind == CostFn::Kind::Queue ? CostFn::queue(cpus.exponential(p.comp_mean))
                                                             : CostFn::linear(cpus.uniform(0.0, 2.0 * p.comp_mean));
      for (int m = 0; m < p.types; ++m) spec.comp_weight[i][m] = cpus.uniform(1.0, 5.0);
    }
    spec.finalize();

    TaskSet tasks;
    tasks.data_size.assign(p.types, 1.0);
    for (int m = 0; m < p.types; ++m) tasks.result_size.push_back(tk.truncated_exponential(0.5, 0.1, 5.0));
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(tasks.tasks.size()) < p.tasks) {
      const int d = tk.below(topo.n), m = tk.below(p.types);
      if (used.insert({d, m}).second) tasks.tasks.push_back({d, m});
    }
    for (int k = 0; k < p.tasks; ++k) {
      std::vector<int> nodes(topo.n);
      for (int i = 0; i < topo.n; ++i) nodes[i] = i;
      Vec r(topo.n, 0.0);
      for (int c = 0; c < p.sources; ++c) {
        const int pick = c + tk.below(topo.n - c);
        std::swap(nodes[c], nodes[pick]);
        r[nodes[c]] = tk.uniform(p.r_min, p.r_max);
      }
      tasks.rate.push_back(std::move(r));
    }

    Strategy init;
    try {
      init = default_init(spec, tasks);
    } catch (const InitError&) {
      continue;
    }
    return {std::move(spec), std::move(tasks), std::move(init), attempt + 1};
  }
  throw InitError("no finite-cost start after 100 parameter draws for " + p.name);
}

}  // namespace sgpnet
