#include "sgpnet/marginals.hpp"

#include <algorithm>

namespace sgpnet {

static Vec link_slopes(const NetworkSpec& spec, const FlowState& flow) {
  Vec d(spec.num_links());
  for (int e = 0; e < spec.num_links(); ++e) d[e] = spec.link_cost[e].d1(flow.F[e]);
  return d;
}

// w_im * C'_i(G_i), or +inf without a CPU.
static double cpu_marginal(const NetworkSpec& spec, const FlowState& flow, int i, int type) {
  if (!spec.comp_cost[i]) return kInf;
  return spec.comp_weight[i][type] * spec.comp_cost[i]->d1(flow.G[i]);
}

Stage1 broadcast_stage1(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow) {
  const Vec dp = link_slopes(spec, flow);
  Stage1 out;
  out.dT_dtplus.assign(tasks.size(), Vec(spec.n, 0.0));
  out.h_plus.assign(tasks.size(), std::vector<int>(spec.n, 0));
  out.improper.assign(tasks.size(), std::vector<char>(spec.n, 0));
  for (int k = 0; k < tasks.size(); ++k) {
    const double L = tasks.result_len(k);
    auto& dt = out.dT_dtplus[k];
    auto& h = out.h_plus[k];
    auto& bad = out.improper[k];
    const auto order = support_order(spec, s, k, false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      if (i == tasks.tasks[k].dest) continue;
      const auto& row = s.result[k][i];
      double acc = 0.0;
      int hmax = -1;
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j] <= 0.0) continue;
        const int nb = spec.out_nbr[i][j];
        acc += row[j] * (L * dp[spec.out_link[i][j]] + dt[nb]);
        hmax = std::max(hmax, h[nb]);
      }
      dt[i] = acc;
      h[i] = hmax + 1;
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j] <= 0.0) continue;
        const int nb = spec.out_nbr[i][j];
        if (bad[nb] || dt[nb] >= dt[i]) bad[i] = 1;
      }
    }
  }
  return out;
}

Stage2 broadcast_stage2(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                        const Stage1& st1) {
  const Vec dp = link_slopes(spec, flow);
  Stage2 out;
  out.dT_dr.assign(tasks.size(), Vec(spec.n, 0.0));
  out.h_minus.assign(tasks.size(), std::vector<int>(spec.n, 0));
  out.improper.assign(tasks.size(), std::vector<char>(spec.n, 0));
  for (int k = 0; k < tasks.size(); ++k) {
    const double L = tasks.data_len(k);
    const int m = tasks.tasks[k].type;
    auto& dr = out.dT_dr[k];
    auto& h = out.h_minus[k];
    auto& bad = out.improper[k];
    const auto order = support_order(spec, s, k, true);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      const auto& row = s.data[k][i];
      double acc = 0.0;
      int hmax = -1;
      if (row[0] > 0.0) {
        acc += row[0] * (cpu_marginal(spec, flow, i, m) + st1.dT_dtplus[k][i]);
        hmax = 0;
      }
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j + 1] <= 0.0) continue;
        const int nb = spec.out_nbr[i][j];
        acc += row[j + 1] * (L * dp[spec.out_link[i][j]] + dr[nb]);
        hmax = std::max(hmax, h[nb] + 1);
      }
      dr[i] = acc;
      h[i] = std::max(hmax, 0);
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j + 1] <= 0.0) continue;
        const int nb = spec.out_nbr[i][j];
        if (bad[nb] || dr[nb] >= dr[i]) bad[i] = 1;
      }
    }
  }
  return out;
}

void compute_deltas(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, MarginalState& m) {
  const Vec dp = link_slopes(spec, flow);
  m.delta_minus.assign(tasks.size(), Table(spec.n));
  m.delta_plus.assign(tasks.size(), Table(spec.n));
  for (int k = 0; k < tasks.size(); ++k) {
    const double Lm = tasks.data_len(k), Lp = tasks.result_len(k);
    const int type = tasks.tasks[k].type;
    for (int i = 0; i < spec.n; ++i) {
      auto& dm = m.delta_minus[k][i];
      auto& dq = m.delta_plus[k][i];
      dm.assign(1 + spec.degree(i), 0.0);
      dq.assign(spec.degree(i), 0.0);
      dm[0] = cpu_marginal(spec, flow, i, type) + m.dT_dtplus[k][i];
      for (int j = 0; j < spec.degree(i); ++j) {
        const int nb = spec.out_nbr[i][j], e = spec.out_link[i][j];
        dm[j + 1] = Lm * dp[e] + m.dT_dr[k][nb];
        dq[j] = Lp * dp[e] + m.dT_dtplus[k][nb];
      }
    }
  }
}

void compute_blocked(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, MarginalState& m) {
  m.blocked_minus.assign(tasks.size(), std::vector<std::vector<char>>(spec.n));
  m.blocked_plus.assign(tasks.size(), std::vector<std::vector<char>>(spec.n));
  for (int k = 0; k < tasks.size(); ++k) {
    const int d = tasks.tasks[k].dest;
    for (int i = 0; i < spec.n; ++i) {
      auto& bm = m.blocked_minus[k][i];
      auto& bp = m.blocked_plus[k][i];
      bm.assign(1 + spec.degree(i), 0);
      bp.assign(spec.degree(i), 0);
      bm[0] = spec.has_cpu(i) ? 0 : 1;
      for (int j = 0; j < spec.degree(i); ++j) {
        const int nb = spec.out_nbr[i][j];
        if (s.data[k][i][j + 1] <= 0.0)
          bm[j + 1] = m.improper_minus[k][nb] || m.dT_dr[k][nb] >= m.dT_dr[k][i];
        if (i == d)
          bp[j] = 1;
        else if (s.result[k][i][j] <= 0.0)
          bp[j] = m.improper_plus[k][nb] || m.dT_dtplus[k][nb] >= m.dT_dtplus[k][i];
      }
    }
  }
}

MarginalState compute_marginals(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                const FlowState& flow) {
  Stage1 a = broadcast_stage1(spec, tasks, s, flow);
  Stage2 b = broadcast_stage2(spec, tasks, s, flow, a);
  MarginalState m;
  m.dT_dtplus = std::move(a.dT_dtplus);
  m.h_plus = std::move(a.h_plus);
  m.improper_plus = std::move(a.improper);
  m.dT_dr = std::move(b.dT_dr);
  m.h_minus = std::move(b.h_minus);
  m.improper_minus = std::move(b.improper);
  compute_deltas(spec, tasks, flow, m);
  compute_blocked(spec, tasks, s, m);
  return m;
}

}  // namespace sgpnet
