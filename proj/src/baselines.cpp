#include "sgpnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "sgpnet/errors.hpp"
#include "sgpnet/paths.hpp"

namespace sgpnet {
namespace {

BaselineResult from_run(std::string name, RunResult r) {
  BaselineResult b;
  b.name = std::move(name);
  b.T = r.flow.T;
  b.flow = std::move(r.flow);
  b.strategy = std::move(r.strategy);
  b.iterations = r.iterations;
  b.converged = r.converged;
  b.trace = std::move(r.trace);
  return b;
}

Mask full_mask(const Strategy& s, bool data, char value) {
  const auto& rows = data ? s.data : s.result;
  Mask m(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    m[k].resize(rows[k].size());
    for (std::size_t i = 0; i < rows[k].size(); ++i) m[k][i].assign(rows[k][i].size(), value);
  }
  return m;
}

}  // namespace

BaselineResult run_gp(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& init, RunConfig cfg) {
  cfg.method = Method::GP;
  return from_run("GP", run(spec, tasks, init, cfg));
}

BaselineResult run_spoo(const NetworkSpec& spec, const TaskSet& tasks, RunConfig cfg) {
  const Vec w = zero_flow_slopes(spec);
  Strategy base = Strategy::zeros(spec, tasks);
  Mask am = full_mask(base, true, 0), ap = full_mask(base, false, 0);
  std::vector<PathTree> trees;
  for (int k = 0; k < tasks.size(); ++k) {
    const int d = tasks.tasks[k].dest;
    trees.push_back(tree_to(spec, d, w));
    const auto& nx = trees.back().next;
    for (int i = 0; i < spec.n; ++i) {
      if (spec.has_cpu(i)) am[k][i][0] = 1;
      if (i == d) continue;
      if (nx[i] < 0) throw InfeasibleError("no path to destination");
      const int slot = spec.slot_of(i, nx[i]);
      am[k][i][slot + 1] = 1;
      ap[k][i][slot] = 1;
      base.result[k][i][slot] = 1.0;
    }
  }

  // Start by computing at the first CPU on each path, then at the destination.
  Strategy init;
  bool found = false;
  for (bool at_dest : {false, true}) {
    Strategy s = base;
    for (int k = 0; k < tasks.size(); ++k) {
      const int d = tasks.tasks[k].dest;
      for (int i = 0; i < spec.n; ++i) {
        auto& row = s.data[k][i];
        if (i == d) {
          if (!spec.has_cpu(d)) throw InfeasibleError("destination without CPU on a frozen path");
          row[0] = 1.0;
        } else if (spec.has_cpu(i) && !at_dest) {
          row[0] = 1.0;
        } else {
          row[1 + spec.slot_of(i, trees[k].next[i])] = 1.0;
        }
      }
    }
    if (std::isfinite(propagate(spec, tasks, s).T)) {
      init = std::move(s);
      found = true;
      break;
    }
  }
  if (!found) throw InfeasibleError("frozen shortest paths cannot carry the demand at finite cost");
  cfg.allowed_minus = std::move(am);
  cfg.allowed_plus = std::move(ap);
  cfg.events.clear();
  return from_run("SPOO", run(spec, tasks, init, cfg));
}

BaselineResult run_lcor(const NetworkSpec& spec, const TaskSet& tasks, RunConfig cfg) {
  Strategy init = tree_strategy(spec, tasks, true);
  if (!std::isfinite(propagate(spec, tasks, init).T))
    throw InfeasibleError("local computation saturates some CPU");
  Mask am = full_mask(init, true, 0);
  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i)
      for (std::size_t j = 0; j < am[k][i].size(); ++j) am[k][i][j] = init.data[k][i][j] > 0.0;
  cfg.allowed_minus = std::move(am);
  cfg.allowed_plus = full_mask(init, false, 1);
  cfg.events.clear();
  return from_run("LCOR", run(spec, tasks, init, cfg));
}

BaselineResult run_lpr(const NetworkSpec& spec, const TaskSet& tasks, double saturation) {
  const Vec w = zero_flow_slopes(spec);
  Vec link_cap(spec.num_links(), kInf), cpu_cap(spec.n, kInf);
  for (int e = 0; e < spec.num_links(); ++e)
    if (spec.link_cost[e].kind == CostFn::Kind::Queue) link_cap[e] = saturation * spec.link_cost[e].param;
  for (int i = 0; i < spec.n; ++i)
    if (spec.comp_cost[i] && spec.comp_cost[i]->kind == CostFn::Kind::Queue)
      cpu_cap[i] = saturation * spec.comp_cost[i]->param;

  struct Demand {
    int task, src;
    double rate;
  };
  std::vector<Demand> demands;
  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i)
      if (tasks.rate[k][i] > 0.0) demands.push_back({k, i, tasks.rate[k][i]});
  std::stable_sort(demands.begin(), demands.end(), [&](const Demand& a, const Demand& b) {
    return a.rate * tasks.data_len(a.task) > b.rate * tasks.data_len(b.task);
  });

  FlowState f;
  f.t_minus.assign(tasks.size(), Vec(spec.n, 0.0));
  f.t_plus = f.g = f.t_minus;
  f.f_minus.assign(tasks.size(), Vec(spec.num_links(), 0.0));
  f.f_plus = f.f_minus;

  std::vector<PathTree> rtree(tasks.size());
  for (int k = 0; k < tasks.size(); ++k) {
    Vec wr = w;
    for (double& x : wr) x *= tasks.result_len(k);
    rtree[k] = tree_to(spec, tasks.tasks[k].dest, wr);
  }

  for (const auto& dm : demands) {
    const int k = dm.task, m = tasks.tasks[k].type;
    const double bits = dm.rate * tasks.data_len(k);
    // Forward Dijkstra from the source over links with enough spare capacity.
    Vec dist(spec.n, kInf);
    std::vector<int> via(spec.n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[dm.src] = 0.0;
    pq.push({0.0, dm.src});
    while (!pq.empty()) {
      const auto [d, i] = pq.top();
      pq.pop();
      if (d > dist[i]) continue;
      for (int s = 0; s < spec.degree(i); ++s) {
        const int e = spec.out_link[i][s], j = spec.out_nbr[i][s];
        if (link_cap[e] < bits) continue;
        const double c = d + tasks.data_len(k) * w[e];
        if (c < dist[j]) {
          dist[j] = c;
          via[j] = e;
          pq.push({c, j});
        }
      }
    }
    int site = -1;
    double best = kInf;
    for (int c = 0; c < spec.n; ++c) {
      if (!spec.comp_cost[c] || dist[c] == kInf) continue;
      if (cpu_cap[c] < spec.comp_weight[c][m] * dm.rate) continue;
      const double cost = dist[c] + spec.comp_weight[c][m] * spec.comp_cost[c]->d1(0.0) + rtree[k].dist[c];
      if (cost < best) {
        best = cost;
        site = c;
      }
    }
    if (site < 0) throw InfeasibleError("saturation caps admit no assignment");
    for (int v = site; v != dm.src;) {
      const int e = via[v];
      link_cap[e] -= bits;
      f.f_minus[k][e] += dm.rate;
      v = spec.links[e].from;
    }
    cpu_cap[site] -= spec.comp_weight[site][m] * dm.rate;
    f.g[k][site] += dm.rate;
    for (int v = site; v != tasks.tasks[k].dest; v = rtree[k].next[v])
      f.f_plus[k][spec.link_index(v, rtree[k].next[v])] += dm.rate;
  }

  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i) {
      f.t_minus[k][i] = f.g[k][i];
      for (int e : spec.out_link[i]) f.t_minus[k][i] += f.f_minus[k][e];
      f.t_plus[k][i] = f.g[k][i];
      for (int e : spec.in_link[i]) f.t_plus[k][i] += f.f_plus[k][e];
    }
  aggregate(spec, tasks, f);

  BaselineResult b;
  b.name = "LPR";
  b.T = f.T;
  b.converged = true;
  Strategy s = strategy_from_flows(spec, tasks, f, tree_strategy(spec, tasks, false));
  if (detect_loops(spec, tasks, s).loop_free()) b.strategy = std::move(s);
  b.flow = std::move(f);
  return b;
}

}  // namespace sgpnet
