#include <algorithm>
#include <cmath>

#include "sgpnet/baselines.hpp"
#include "sgpnet/errors.hpp"
#include "sgpnet/paths.hpp"

namespace sgpnet {
namespace {

// All-or-nothing assignment of every source to its cheapest
// data path -> CPU -> result path under the given marginals.
void cheapest_routes(const NetworkSpec& spec, const TaskSet& tasks, const Vec& dlink, const Vec& dcpu,
                     FlowState& y) {
  for (int k = 0; k < tasks.size(); ++k) {
    std::fill(y.f_minus[k].begin(), y.f_minus[k].end(), 0.0);
    std::fill(y.f_plus[k].begin(), y.f_plus[k].end(), 0.0);
    std::fill(y.g[k].begin(), y.g[k].end(), 0.0);
    const int d = tasks.tasks[k].dest, m = tasks.tasks[k].type;
    Vec wr = dlink, wd = dlink;
    for (double& x : wr) x *= tasks.result_len(k);
    for (double& x : wd) x *= tasks.data_len(k);
    const PathTree rt = tree_to(spec, d, wr);
    Vec label(spec.n, kInf);
    for (int i = 0; i < spec.n; ++i)
      if (spec.comp_cost[i]) label[i] = spec.comp_weight[i][m] * dcpu[i] + rt.dist[i];
    const PathTree ft = shortest_tree(spec, label, wd);
    for (int s = 0; s < spec.n; ++s) {
      const double r = tasks.rate[k][s];
      if (r <= 0.0) continue;
      if (!std::isfinite(ft.dist[s])) throw InfeasibleError("source cannot reach any CPU");
      int v = s;
      while (ft.next[v] >= 0) {
        y.f_minus[k][spec.link_index(v, ft.next[v])] += r;
        v = ft.next[v];
      }
      y.g[k][v] += r;
      while (v != d) {
        y.f_plus[k][spec.link_index(v, rt.next[v])] += r;
        v = rt.next[v];
      }
    }
  }
}

// Directional derivative of T at x + gamma*dx.
double slope_along(const NetworkSpec& spec, const Vec& F, const Vec& dF, const Vec& G, const Vec& dG,
                   double gamma) {
  double h = 0.0;
  for (int e = 0; e < spec.num_links(); ++e)
    if (dF[e] != 0.0) h += spec.link_cost[e].d1(F[e] + gamma * dF[e]) * dF[e];
  for (int i = 0; i < spec.n; ++i) {
    if (dG[i] == 0.0) continue;
    if (!spec.comp_cost[i]) return dG[i] > 0.0 ? kInf : -kInf;
    h += spec.comp_cost[i]->d1(G[i] + gamma * dG[i]) * dG[i];
  }
  return std::isnan(h) ? kInf : h;
}

}  // namespace

BaselineResult convex_oracle(const NetworkSpec& spec, const TaskSet& tasks, double tol, int max_iters) {
  FlowState x;
  try {
    x = propagate(spec, tasks, default_init(spec, tasks));
  } catch (const InitError& e) {
    throw InfeasibleError(e.what());
  }
  FlowState y = x;
  double lower = -kInf;
  BaselineResult out;
  out.name = "Oracle";
  int it = 0;
  for (; it < max_iters; ++it) {
    Vec dlink(spec.num_links()), dcpu(spec.n, 0.0);
    for (int e = 0; e < spec.num_links(); ++e) dlink[e] = spec.link_cost[e].d1(x.F[e]);
    for (int i = 0; i < spec.n; ++i)
      if (spec.comp_cost[i]) dcpu[i] = spec.comp_cost[i]->d1(x.G[i]);
    cheapest_routes(spec, tasks, dlink, dcpu, y);
    aggregate(spec, tasks, y);

    Vec dF(spec.num_links()), dG(spec.n);
    for (int e = 0; e < spec.num_links(); ++e) dF[e] = y.F[e] - x.F[e];
    for (int i = 0; i < spec.n; ++i) dG[i] = y.G[i] - x.G[i];
    const double gap = -slope_along(spec, x.F, dF, x.G, dG, 0.0);
    lower = std::max(lower, x.T - gap);
    out.gap = x.T - lower;
    if (out.gap <= tol * std::max(x.T, 1e-12)) {
      out.converged = true;
      break;
    }

    double gamma = 1.0;
    if (slope_along(spec, x.F, dF, x.G, dG, 1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < 60; ++b) {
        const double mid = 0.5 * (lo + hi);
        (slope_along(spec, x.F, dF, x.G, dG, mid) > 0.0 ? hi : lo) = mid;
      }
      gamma = lo;
    }
    for (int k = 0; k < tasks.size(); ++k) {
      for (int e = 0; e < spec.num_links(); ++e) {
        x.f_minus[k][e] += gamma * (y.f_minus[k][e] - x.f_minus[k][e]);
        x.f_plus[k][e] += gamma * (y.f_plus[k][e] - x.f_plus[k][e]);
      }
      for (int i = 0; i < spec.n; ++i) x.g[k][i] += gamma * (y.g[k][i] - x.g[k][i]);
    }
    aggregate(spec, tasks, x);
  }
  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i) {
      x.t_minus[k][i] = x.g[k][i];
      for (int e : spec.out_link[i]) x.t_minus[k][i] += x.f_minus[k][e];
      x.t_plus[k][i] = x.g[k][i];
      for (int e : spec.in_link[i]) x.t_plus[k][i] += x.f_plus[k][e];
    }
  out.iterations = it + 1;
  out.T = x.T;
  Strategy s = strategy_from_flows(spec, tasks, x, tree_strategy(spec, tasks, false));
  if (detect_loops(spec, tasks, s).loop_free()) out.strategy = std::move(s);
  out.flow = std::move(x);
  return out;
}

}  // namespace sgpnet
