#include "sgpnet/network.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace sgpnet {

NetworkSpec::NetworkSpec(int nodes, int types)
    : n(nodes),
      comp_cost(nodes),
      comp_weight(nodes, std::vector<double>(types, 1.0)),
      label(nodes) {
  std::iota(label.begin(), label.end(), 0);
}

void NetworkSpec::add_link(int i, int j, CostFn cost) {
  links.push_back({i, j});
  link_cost.push_back(cost);
}

void NetworkSpec::finalize() {
  if (static_cast<int>(label.size()) != n) {
    label.resize(n);
    std::iota(label.begin(), label.end(), 0);
  }
  out_nbr.assign(n, {});
  out_link.assign(n, {});
  in_link.assign(n, {});
  std::vector<std::vector<std::pair<int, int>>> tmp(n);
  for (int e = 0; e < num_links(); ++e) {
    const auto [i, j] = links[e];
    if (i < 0 || i >= n || j < 0 || j >= n) continue;
    tmp[i].push_back({j, e});
    in_link[j].push_back(e);
  }
  for (int i = 0; i < n; ++i) {
    std::sort(tmp[i].begin(), tmp[i].end());
    for (auto [j, e] : tmp[i]) {
      out_nbr[i].push_back(j);
      out_link[i].push_back(e);
    }
  }
}

int NetworkSpec::slot_of(int i, int j) const {
  const auto& v = out_nbr[i];
  auto it = std::lower_bound(v.begin(), v.end(), j);
  if (it == v.end() || *it != j) return -1;
  return static_cast<int>(it - v.begin());
}

int NetworkSpec::link_index(int i, int j) const {
  const int s = slot_of(i, j);
  return s < 0 ? -1 : out_link[i][s];
}

double TaskSet::total_rate() const {
  double s = 0.0;
  for (const auto& row : rate)
    for (double x : row) s += x;
  return s;
}

static bool reaches_all(int n, int src, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{src};
  seen[src] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n;
}

bool strongly_connected(const NetworkSpec& spec) {
  if (spec.n <= 1) return true;
  std::vector<std::vector<int>> fwd(spec.n), bwd(spec.n);
  for (const auto& l : spec.links) {
    fwd[l.from].push_back(l.to);
    bwd[l.to].push_back(l.from);
  }
  return reaches_all(spec.n, 0, fwd) && reaches_all(spec.n, 0, bwd);
}

ValidationReport validate(const NetworkSpec& spec, const TaskSet& tasks) {
  ValidationReport rep;
  auto bad = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  auto pair_str = [](int a, int b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; };

  std::set<std::pair<int, int>> seen;
  bool ids_ok = true;
  for (const auto& l : spec.links) {
    if (l.from < 0 || l.from >= spec.n || l.to < 0 || l.to >= spec.n) {
      bad("link " + pair_str(l.from, l.to) + " references an unknown node");
      ids_ok = false;
      continue;
    }
    if (l.from == l.to) bad("self loop at node " + std::to_string(l.from));
    if (!seen.insert({l.from, l.to}).second) bad("duplicate link " + pair_str(l.from, l.to));
  }
  for (const auto& [i, j] : seen)
    if (!seen.count({j, i})) bad("missing reverse link " + pair_str(j, i));
  if (ids_ok && !strongly_connected(spec)) bad("graph is not strongly connected");

  for (int e = 0; e < spec.num_links(); ++e) {
    const auto& c = spec.link_cost[e];
    if (c.kind == CostFn::Kind::Queue && !(c.param > 0.0))
      bad("nonpositive capacity on link " + pair_str(spec.links[e].from, spec.links[e].to));
    if (c.kind == CostFn::Kind::Linear && !(c.param >= 0.0))
      bad("negative slope on link " + pair_str(spec.links[e].from, spec.links[e].to));
  }
  for (int i = 0; i < spec.n; ++i) {
    if (const auto& c = spec.comp_cost[i]) {
      if (c->kind == CostFn::Kind::Queue && !(c->param > 0.0))
        bad("nonpositive computation capacity at node " + std::to_string(i));
      if (c->kind == CostFn::Kind::Linear && !(c->param >= 0.0))
        bad("negative computation slope at node " + std::to_string(i));
    }
    for (double w : spec.comp_weight[i])
      if (!(w > 0.0)) {
        bad("nonpositive computation weight at node " + std::to_string(i));
        break;
      }
  }

  const int types = spec.num_types();
  if (static_cast<int>(tasks.data_size.size()) < types || static_cast<int>(tasks.result_size.size()) < types)
    bad("packet sizes missing for some computation type");
  for (double x : tasks.data_size)
    if (!(x > 0.0)) bad("nonpositive data packet size");
  for (double x : tasks.result_size)
    if (!(x > 0.0)) bad("nonpositive result packet size");
  if (static_cast<int>(tasks.rate.size()) != tasks.size()) bad("rate table does not match task count");
  std::set<std::pair<int, int>> task_ids;
  for (int k = 0; k < tasks.size(); ++k) {
    const auto& t = tasks.tasks[k];
    if (t.dest < 0 || t.dest >= spec.n) bad("bad destination for task " + std::to_string(k));
    if (t.type < 0 || t.type >= types) bad("bad computation type for task " + std::to_string(k));
    if (!task_ids.insert({t.dest, t.type}).second) bad("duplicate task " + pair_str(t.dest, t.type));
    if (k < static_cast<int>(tasks.rate.size())) {
      if (static_cast<int>(tasks.rate[k].size()) != spec.n) bad("rate vector size mismatch for task " + std::to_string(k));
      for (double r : tasks.rate[k])
        if (!(r >= 0.0)) {
          bad("negative input rate for task " + std::to_string(k));
          break;
        }
    }
  }
  return rep;
}

Reduced remove_node(const NetworkSpec& spec, const TaskSet& tasks, int v) {
  Reduced out;
  out.node_map.assign(spec.n, -1);
  int next = 0;
  for (int i = 0; i < spec.n; ++i)
    if (i != v) out.node_map[i] = next++;

  NetworkSpec s(next, spec.num_types());
  for (int i = 0; i < spec.n; ++i) {
    const int ni = out.node_map[i];
    if (ni < 0) continue;
    s.comp_cost[ni] = spec.comp_cost[i];
    s.comp_weight[ni] = spec.comp_weight[i];
    s.label[ni] = spec.label[i];
  }
  for (int e = 0; e < spec.num_links(); ++e) {
    const int a = out.node_map[spec.links[e].from], b = out.node_map[spec.links[e].to];
    if (a >= 0 && b >= 0) s.add_link(a, b, spec.link_cost[e]);
  }
  s.finalize();

  TaskSet t;
  t.data_size = tasks.data_size;
  t.result_size = tasks.result_size;
  for (int k = 0; k < tasks.size(); ++k) {
    if (tasks.tasks[k].dest == v) continue;
    t.tasks.push_back({out.node_map[tasks.tasks[k].dest], tasks.tasks[k].type});
    std::vector<double> r(next, 0.0);
    for (int i = 0; i < spec.n; ++i)
      if (out.node_map[i] >= 0) r[out.node_map[i]] = tasks.rate[k][i];
    t.rate.push_back(std::move(r));
    out.kept_task.push_back(k);
  }
  out.spec = std::move(s);
  out.tasks = std::move(t);
  return out;
}

}  // namespace sgpnet
