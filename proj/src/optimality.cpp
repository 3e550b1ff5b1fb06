#include "sgpnet/optimality.hpp"

#include <algorithm>
#include <cmath>

#include "sgpnet/errors.hpp"

namespace sgpnet {
namespace {

// Scans one row. `score` is the quantity compared (delta or t*delta).
template <class Fn>
void scan_row(const Vec& phi, const Vec& score, const std::vector<char>* allowed, Fn&& on_gap) {
  double lo = kInf;
  for (std::size_t j = 0; j < phi.size(); ++j)
    if (!allowed || (*allowed)[j]) lo = std::min(lo, score[j]);
  if (!std::isfinite(lo)) return;
  for (std::size_t j = 0; j < phi.size(); ++j)
    if (phi[j] > 0.0) on_gap(static_cast<int>(j), score[j] - lo);
}

template <class Fn>
void scan_all(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const MarginalState& m,
              const FlowState* flow, const Mask* am, const Mask* ap, Fn&& on_gap) {
  Vec tmp;
  for (int k = 0; k < tasks.size(); ++k) {
    for (int i = 0; i < spec.n; ++i) {
      const Vec* dm = &m.delta_minus[k][i];
      const Vec* dp = &m.delta_plus[k][i];
      Vec sm, sp;
      if (flow) {
        sm = *dm;
        for (double& x : sm) x = x * flow->t_minus[k][i];
        sp = *dp;
        for (double& x : sp) x = x * flow->t_plus[k][i];
        if (flow->t_minus[k][i] == 0.0) std::fill(sm.begin(), sm.end(), 0.0);
        if (flow->t_plus[k][i] == 0.0) std::fill(sp.begin(), sp.end(), 0.0);
        dm = &sm;
        dp = &sp;
      }
      scan_row(s.data[k][i], *dm, am ? &(*am)[k][i] : nullptr,
               [&](int j, double gap) { on_gap(GapEntry{i, k, false, j, gap}); });
      if (i != tasks.tasks[k].dest)
        scan_row(s.result[k][i], *dp, ap ? &(*ap)[k][i] : nullptr,
                 [&](int j, double gap) { on_gap(GapEntry{i, k, true, j, gap}); });
    }
  }
}

OptimalityReport collect(double tol, auto&& run) {
  OptimalityReport rep;
  run([&](const GapEntry& e) {
    rep.worst_violation = std::max(rep.worst_violation, e.gap);
    if (!(e.gap <= tol)) rep.violating_entries.push_back(e);
  });
  return rep;
}

}  // namespace

OptimalityReport check_kkt(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                           const MarginalState& m, double tol) {
  auto rep = collect(tol, [&](auto&& cb) { scan_all(spec, tasks, s, m, &flow, nullptr, nullptr, cb); });
  rep.kkt_ok = rep.violating_entries.empty();
  const auto suf = check_sufficient(spec, tasks, s, m, tol);
  rep.sufficient_ok = suf.sufficient_ok;
  return rep;
}

OptimalityReport check_sufficient(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                  const MarginalState& m, double tol) {
  auto rep = collect(tol, [&](auto&& cb) { scan_all(spec, tasks, s, m, nullptr, nullptr, nullptr, cb); });
  rep.sufficient_ok = rep.violating_entries.empty();
  // Whether KKT also holds is not known without traffic; it is implied when
  // the sufficient condition holds.
  rep.kkt_ok = rep.sufficient_ok;
  return rep;
}

double sufficient_residual(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const MarginalState& m,
                           const Mask* allowed_minus, const Mask* allowed_plus) {
  double worst = 0.0;
  scan_all(spec, tasks, s, m, nullptr, allowed_minus, allowed_plus,
           [&](const GapEntry& e) { worst = std::max(worst, std::isnan(e.gap) ? kInf : e.gap); });
  return worst;
}

GeodesicReport geodesic_probe(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& phi1,
                              const Strategy& phi2, int samples) {
  if (samples < 3) samples = 3;
  const FlowState f1 = propagate(spec, tasks, phi1);
  const FlowState f2 = propagate(spec, tasks, phi2);

  // Rows that differ between the endpoints must carry traffic on the segment.
  // Traffic is affine along the segment, so checking the endpoints suffices.
  for (int k = 0; k < tasks.size(); ++k)
    for (int i = 0; i < spec.n; ++i) {
      if (f1.t_minus[k][i] == 0.0 && f2.t_minus[k][i] == 0.0 && phi1.data[k][i] != phi2.data[k][i])
        throw DegenerateError("zero data traffic at node " + std::to_string(i) + " with differing rows");
      if (i != tasks.tasks[k].dest && f1.t_plus[k][i] == 0.0 && f2.t_plus[k][i] == 0.0 &&
          phi1.result[k][i] != phi2.result[k][i])
        throw DegenerateError("zero result traffic at node " + std::to_string(i) + " with differing rows");
    }

  GeodesicReport rep;
  rep.samples = samples;
  for (int a = 0; a < samples; ++a) {
    const double t = static_cast<double>(a) / (samples - 1);
    FlowState f = f1;
    for (int k = 0; k < tasks.size(); ++k) {
      for (int e = 0; e < spec.num_links(); ++e) {
        f.f_minus[k][e] = (1 - t) * f1.f_minus[k][e] + t * f2.f_minus[k][e];
        f.f_plus[k][e] = (1 - t) * f1.f_plus[k][e] + t * f2.f_plus[k][e];
      }
      for (int i = 0; i < spec.n; ++i) f.g[k][i] = (1 - t) * f1.g[k][i] + t * f2.g[k][i];
    }
    const Strategy s = strategy_from_flows(spec, tasks, f, phi1);
    try {
      rep.costs.push_back(propagate(spec, tasks, s).T);
    } catch (const LoopError&) {
      throw DegenerateError("segment leaves the loop-free set at t = " + std::to_string(t));
    }
  }
  for (int a = 0; a < samples; ++a)
    for (int b = a + 2; b < samples; b += 2) {
      const double v = rep.costs[(a + b) / 2] - 0.5 * (rep.costs[a] + rep.costs[b]);
      rep.max_violation = std::max(rep.max_violation, v);
    }
  return rep;
}

}  // namespace sgpnet
