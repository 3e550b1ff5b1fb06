#include "sgpnet/congestion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sgpnet/errors.hpp"

namespace sgpnet {

double UtilityFn::value(double r) const {
  if (alpha < 1.0) return std::pow(r, 1.0 - alpha) / (1.0 - alpha);
  if (alpha == 1.0) return std::log(r + epsilon) - std::log(epsilon);
  return (std::pow(r + epsilon, 1.0 - alpha) - std::pow(epsilon, 1.0 - alpha)) / (1.0 - alpha);
}

double UtilityFn::d1(double r) const {
  if (alpha == 0.0) return 1.0;
  if (alpha < 1.0) return r > 0.0 ? std::pow(r, -alpha) : kInf;
  return std::pow(r + epsilon, -alpha);
}

double UtilityFn::d2(double r) const {
  if (alpha == 0.0) return 0.0;
  if (alpha < 1.0) return r > 0.0 ? -alpha * std::pow(r, -alpha - 1.0) : -kInf;
  return -alpha * std::pow(r + epsilon, -alpha - 1.0);
}

ExtendedNetwork build_extended(const NetworkSpec& spec, const TaskSet& tasks, const Table& rbar,
                               const std::vector<std::vector<UtilityFn>>& utility) {
  ExtendedNetwork ext{spec, tasks, {}};
  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i) {
      const double r = rbar[k][i];
      if (r < 0.0) throw ParamError("negative offered rate at node " + std::to_string(i));
      ext.offered.rate[k][i] = r;
      if (r == 0.0) continue;
      const UtilityFn& u = utility[k][i];
      if (u.alpha < 0.0) throw ParamError("negative fairness parameter");
      if (u.alpha >= 1.0 && u.epsilon <= 0.0) throw ParamError("utility offset must be positive");
      ext.gateways.push_back({k, i, r, u});
    }
  return ext;
}

ExtendedNetwork build_extended(const NetworkSpec& spec, const TaskSet& tasks, const Table& rbar,
                               const UtilityFn& utility) {
  std::vector<std::vector<UtilityFn>> u(tasks.size(), std::vector<UtilityFn>(spec.n, utility));
  return build_extended(spec, tasks, rbar, u);
}

ExtStrategy all_reject(const ExtendedNetwork& ext) {
  ExtStrategy s{tree_strategy(ext.spec, ext.offered, true), {}};
  s.gate.assign(ext.gateways.size(), Vec{0.0, 1.0});
  return s;
}

std::vector<double> admitted(const ExtendedNetwork& ext, const ExtStrategy& s) {
  std::vector<double> r(ext.gateways.size());
  for (std::size_t g = 0; g < r.size(); ++g) r[g] = ext.gateways[g].rbar * s.gate[g][0];
  return r;
}

TaskSet admitted_tasks(const ExtendedNetwork& ext, const ExtStrategy& s) {
  TaskSet t = ext.offered;
  for (auto& row : t.rate) std::fill(row.begin(), row.end(), 0.0);
  const auto r = admitted(ext, s);
  for (std::size_t g = 0; g < r.size(); ++g) t.rate[ext.gateways[g].task][ext.gateways[g].node] = r[g];
  return t;
}

namespace {

double utility_loss(const ExtendedNetwork& ext, const std::vector<double>& r) {
  double loss = 0.0;
  for (std::size_t g = 0; g < r.size(); ++g) {
    const auto& gw = ext.gateways[g];
    loss += gw.utility.value(gw.rbar) - gw.utility.value(r[g]);
  }
  return loss;
}

struct Evaluated {
  TaskSet tasks;
  FlowState flow;
  double TE;
};

Evaluated evaluate(const ExtendedNetwork& ext, const ExtStrategy& s) {
  Evaluated e{admitted_tasks(ext, s), {}, 0.0};
  e.flow = propagate(ext.spec, e.tasks, s.phys);
  e.TE = e.flow.T + utility_loss(ext, admitted(ext, s));
  return e;
}

// Gap of gateway g under the admission condition; 0 when it holds exactly.
double gate_gap(const Gateway& gw, const Vec& row, double rate, const MarginalState& m) {
  const double net = m.dT_dr[gw.task][gw.node];
  const double u = gw.utility.d1(rate);
  double gap = 0.0;
  if (row[0] > 0.0) gap = std::max(gap, net - u);
  if (row[1] > 0.0) gap = std::max(gap, u - net);
  return gap;
}

}  // namespace

double extended_cost(const ExtendedNetwork& ext, const ExtStrategy& s) { return evaluate(ext, s).TE; }

double net_utility(const ExtendedNetwork& ext, const ExtStrategy& s) {
  const auto r = admitted(ext, s);
  double u = 0.0;
  for (std::size_t g = 0; g < r.size(); ++g) u += ext.gateways[g].utility.value(r[g]);
  return u - propagate(ext.spec, admitted_tasks(ext, s), s.phys).T;
}

CcReport check_sufficient_cc(const ExtendedNetwork& ext, const ExtStrategy& s, double tol) {
  const Evaluated e = evaluate(ext, s);
  const MarginalState m = compute_marginals(ext.spec, e.tasks, s.phys, e.flow);
  const auto r = admitted(ext, s);
  CcReport rep;
  for (std::size_t g = 0; g < r.size(); ++g) {
    const double gap = gate_gap(ext.gateways[g], s.gate[g], r[g], m);
    rep.worst_virtual = std::max(rep.worst_virtual, gap);
    if (gap > tol) rep.violating.push_back({static_cast<int>(g), gap});
  }
  rep.worst_physical = sufficient_residual(ext.spec, e.tasks, s.phys, m);
  rep.ok = rep.worst_virtual <= tol && rep.worst_physical <= tol;
  return rep;
}

CcResult run_sgp_cc(const ExtendedNetwork& ext, const RunConfig& cfg) { return run_sgp_cc(ext, all_reject(ext), cfg); }

CcResult run_sgp_cc(const ExtendedNetwork& ext, const ExtStrategy& init, const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  CcResult res;
  res.strategy = init;
  ExtStrategy& s = res.strategy;
  Evaluated cur = evaluate(ext, s);
  if (!std::isfinite(cur.TE)) throw InitError("extended start has infinite cost");
  const double T0 = cur.TE;
  const std::size_t G = ext.gateways.size();

  for (int it = 1;; ++it) {
    const MarginalState m = compute_marginals(ext.spec, cur.tasks, s.phys, cur.flow);
    const auto rate = admitted(ext, s);
    double residual = sufficient_residual(ext.spec, cur.tasks, s.phys, m);
    for (std::size_t g = 0; g < G; ++g) residual = std::max(residual, gate_gap(ext.gateways[g], s.gate[g], rate[g], m));
    res.residual = residual;
    res.iterations = it;
    TraceRecord rec{it, cur.TE, residual, -1, false, 0.0};
    const bool stop = residual < cfg.tol || it == cfg.max_iters;
    if (residual < cfg.tol) res.converged = true;
    if (stop) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      res.trace.push_back(rec);
      break;
    }

    Curvature curv;
    if (cfg.curvature == Curvature_mode::Local) {
      curv = local_curvature(ext.spec, cur.flow);
      add_downstream(ext.spec, cur.tasks, s.phys, curv);
    } else {
      curv = curvature_bounds(ext.spec, cfg.curvature == Curvature_mode::InitialCost ? T0 : cur.TE);
    }
    RunConfig inner = cfg;
    inner.allowed_minus.reset();
    inner.allowed_plus.reset();
    const auto phys = propose_all(ext.spec, cur.tasks, s.phys, cur.flow, m, curv, inner);

    // Gateway rows: slot 0 admits into the node, slot 1 rejects. The admit
    // slot sees the curvature downstream of the node, the reject slot -U''.
    std::vector<Vec> gate(G);
    for (std::size_t g = 0; g < G; ++g) {
      const auto& gw = ext.gateways[g];
      const Vec delta{m.dT_dr[gw.task][gw.node], gw.utility.d1(rate[g])};
      std::vector<char> blocked{0, 0};
      if (!std::isfinite(delta[1])) blocked[1] = 1;
      if (!std::isfinite(delta[0]) && !blocked[1]) blocked[0] = 1;
      const double L = ext.offered.data_len(gw.task);
      const double down = curv.down_minus.empty() ? 2.0 * m.h_minus[gw.task][gw.node] * L * L * curv.A
                                                  : curv.down_minus[gw.task][gw.node];
      const double loss = -gw.utility.d2(rate[g]);
      const Vec M{0.5 * gw.rbar * down, 0.5 * gw.rbar * (std::isfinite(loss) ? loss : 0.0)};
      Vec d = delta;
      for (int j = 0; j < 2; ++j)
        if (blocked[j]) d[j] = 0.0;
      gate[g] = simplex_qp(s.gate[g], d, M, blocked, cfg.gp_beta);
    }

    double step = 1.0;
    for (int h = 0; h <= 30; ++h, step *= 0.5) {
      ExtStrategy trial = s;
      for (const auto& u : phys) {
        Vec& row = u.result ? trial.phys.result[u.task][u.node] : trial.phys.data[u.task][u.node];
        const Vec& old = u.result ? s.phys.result[u.task][u.node] : s.phys.data[u.task][u.node];
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = old[j] + step * (u.row[j] - old[j]);
      }
      for (std::size_t g = 0; g < G; ++g) {
        double a = s.gate[g][0] + step * (gate[g][0] - s.gate[g][0]);
        if (a < kSnap) a = 0.0;
        if (a > 1.0 - kSnap) a = 1.0;
        trial.gate[g] = {a, 1.0 - a};
      }
      snap(trial.phys);
      Evaluated next;
      try {
        next = evaluate(ext, trial);
      } catch (const LoopError&) {
        continue;
      }
      if (next.TE <= cur.TE) {
        s = std::move(trial);
        cur = std::move(next);
        break;
      }
    }
    if (cfg.check_invariants && !detect_loops(ext.spec, cur.tasks, s.phys).loop_free()) res.loop_free = false;
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    res.trace.push_back(rec);
  }
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    if (res.trace[i].T > res.trace[i - 1].T) res.monotone = false;
  res.rates = admitted(ext, s);
  return res;
}

}  // namespace sgpnet
