#include "sgpnet/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sgpnet/errors.hpp"

namespace sgpnet {

Strategy Strategy::zeros(const NetworkSpec& spec, const TaskSet& tasks) {
  Strategy s;
  s.data.resize(tasks.size());
  s.result.resize(tasks.size());
  for (int k = 0; k < tasks.size(); ++k) {
    s.data[k].resize(spec.n);
    s.result[k].resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
      s.data[k][i].assign(1 + spec.degree(i), 0.0);
      s.result[k][i].assign(spec.degree(i), 0.0);
    }
  }
  return s;
}

static void snap_row(Vec& row) {
  double sum = 0.0;
  for (double& x : row) {
    if (x < kSnap) x = 0.0;
    sum += x;
  }
  if (sum > 0.0 && sum != 1.0)
    for (double& x : row) x /= sum;
}

void snap(Strategy& s) {
  for (auto& task : s.data)
    for (auto& row : task) snap_row(row);
  for (auto& task : s.result)
    for (auto& row : task) snap_row(row);
}

bool LoopReport::loop_free() const {
  return std::none_of(data_loop.begin(), data_loop.end(), [](char c) { return c; }) &&
         std::none_of(result_loop.begin(), result_loop.end(), [](char c) { return c; });
}

// Kahn's algorithm over links with positive fraction. Returns false on a cycle.
static bool kahn(const NetworkSpec& spec, const Table& rows, int offset, std::vector<int>& order) {
  const int n = spec.n;
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < spec.degree(i); ++s)
      if (rows[i][s + offset] > 0.0) ++indeg[spec.out_nbr[i][s]];
  order.clear();
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) order.push_back(i);
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int i = order[h];
    for (int s = 0; s < spec.degree(i); ++s)
      if (rows[i][s + offset] > 0.0 && --indeg[spec.out_nbr[i][s]] == 0) order.push_back(spec.out_nbr[i][s]);
  }
  return static_cast<int>(order.size()) == n;
}

std::vector<int> support_order(const NetworkSpec& spec, const Strategy& s, int task, bool data) {
  std::vector<int> order;
  if (!kahn(spec, data ? s.data[task] : s.result[task], data ? 1 : 0, order))
    throw LoopError(std::string(data ? "data" : "result") + " loop in task " + std::to_string(task));
  return order;
}

LoopReport detect_loops(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s) {
  LoopReport rep;
  rep.data_loop.assign(tasks.size(), 0);
  rep.result_loop.assign(tasks.size(), 0);
  std::vector<int> order;
  for (int k = 0; k < tasks.size(); ++k) {
    rep.data_loop[k] = !kahn(spec, s.data[k], 1, order);
    rep.result_loop[k] = !kahn(spec, s.result[k], 0, order);
  }
  return rep;
}

static FlowState empty_flow(const NetworkSpec& spec, const TaskSet& tasks) {
  FlowState f;
  const int K = tasks.size();
  f.t_minus.assign(K, Vec(spec.n, 0.0));
  f.t_plus.assign(K, Vec(spec.n, 0.0));
  f.g.assign(K, Vec(spec.n, 0.0));
  f.f_minus.assign(K, Vec(spec.num_links(), 0.0));
  f.f_plus.assign(K, Vec(spec.num_links(), 0.0));
  return f;
}

FlowState propagate(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s) {
  FlowState f = empty_flow(spec, tasks);
  for (int k = 0; k < tasks.size(); ++k) {
    auto& tm = f.t_minus[k];
    tm = tasks.rate[k];
    for (int i : support_order(spec, s, k, true)) {
      const auto& row = s.data[k][i];
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j + 1] <= 0.0) continue;
        const double x = tm[i] * row[j + 1];
        f.f_minus[k][spec.out_link[i][j]] = x;
        tm[spec.out_nbr[i][j]] += x;
      }
      f.g[k][i] = tm[i] * row[0];
    }
    auto& tp = f.t_plus[k];
    tp = f.g[k];
    for (int i : support_order(spec, s, k, false)) {
      const auto& row = s.result[k][i];
      for (int j = 0; j < spec.degree(i); ++j) {
        if (row[j] <= 0.0) continue;
        const double x = tp[i] * row[j];
        f.f_plus[k][spec.out_link[i][j]] = x;
        tp[spec.out_nbr[i][j]] += x;
      }
    }
  }
  aggregate(spec, tasks, f);
  return f;
}

void aggregate(const NetworkSpec& spec, const TaskSet& tasks, FlowState& f) {
  f.F.assign(spec.num_links(), 0.0);
  f.G.assign(spec.n, 0.0);
  for (int k = 0; k < tasks.size(); ++k) {
    const double lm = tasks.data_len(k), lp = tasks.result_len(k);
    for (int e = 0; e < spec.num_links(); ++e) f.F[e] += lm * f.f_minus[k][e] + lp * f.f_plus[k][e];
    const int m = tasks.tasks[k].type;
    for (int i = 0; i < spec.n; ++i) f.G[i] += spec.comp_weight[i][m] * f.g[k][i];
  }
  f.T = total_cost(spec, f);
}

double total_cost(const NetworkSpec& spec, const FlowState& f) {
  double T = 0.0;
  for (int e = 0; e < spec.num_links(); ++e) T += spec.link_cost[e].value(f.F[e]);
  for (int i = 0; i < spec.n; ++i) {
    if (spec.comp_cost[i])
      T += spec.comp_cost[i]->value(f.G[i]);
    else if (f.G[i] > 0.0)
      T = kInf;
  }
  return T;
}

FlowState propagate_dense(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s) {
  FlowState f = empty_flow(spec, tasks);
  const int n = spec.n;
  for (int k = 0; k < tasks.size(); ++k) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      r(i) = tasks.rate[k][i];
      for (int j = 0; j < spec.degree(i); ++j) A(spec.out_nbr[i][j], i) -= s.data[k][i][j + 1];
    }
    const Eigen::VectorXd tm = A.partialPivLu().solve(r);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd gk(n);
    for (int i = 0; i < n; ++i) {
      gk(i) = tm(i) * s.data[k][i][0];
      for (int j = 0; j < spec.degree(i); ++j) B(spec.out_nbr[i][j], i) -= s.result[k][i][j];
    }
    const Eigen::VectorXd tp = B.partialPivLu().solve(gk);
    for (int i = 0; i < n; ++i) {
      f.t_minus[k][i] = tm(i);
      f.g[k][i] = gk(i);
      f.t_plus[k][i] = tp(i);
      for (int j = 0; j < spec.degree(i); ++j) {
        f.f_minus[k][spec.out_link[i][j]] = tm(i) * s.data[k][i][j + 1];
        f.f_plus[k][spec.out_link[i][j]] = tp(i) * s.result[k][i][j];
      }
    }
  }
  aggregate(spec, tasks, f);
  return f;
}

Strategy strategy_from_flows(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow,
                             const Strategy& fallback) {
  Strategy s = fallback;
  for (int k = 0; k < tasks.size(); ++k) {
    const int d = tasks.tasks[k].dest;
    for (int i = 0; i < spec.n; ++i) {
      double out = flow.g[k][i];
      for (int j = 0; j < spec.degree(i); ++j) out += flow.f_minus[k][spec.out_link[i][j]];
      if (out > 0.0) {
        auto& row = s.data[k][i];
        row[0] = flow.g[k][i] / out;
        for (int j = 0; j < spec.degree(i); ++j) row[j + 1] = flow.f_minus[k][spec.out_link[i][j]] / out;
      }
      if (i == d) continue;
      double outp = 0.0;
      for (int j = 0; j < spec.degree(i); ++j) outp += flow.f_plus[k][spec.out_link[i][j]];
      if (outp > 0.0) {
        auto& row = s.result[k][i];
        for (int j = 0; j < spec.degree(i); ++j) row[j] = flow.f_plus[k][spec.out_link[i][j]] / outp;
      }
    }
  }
  return s;
}

double conservation_residual(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow) {
  double worst = 0.0;
  for (int k = 0; k < tasks.size(); ++k) {
    const int d = tasks.tasks[k].dest;
    for (int i = 0; i < spec.n; ++i) {
      double out = flow.g[k][i], in = tasks.rate[k][i];
      double outp = 0.0, inp = flow.g[k][i];
      for (int e : spec.out_link[i]) {
        out += flow.f_minus[k][e];
        outp += flow.f_plus[k][e];
      }
      for (int e : spec.in_link[i]) {
        in += flow.f_minus[k][e];
        inp += flow.f_plus[k][e];
      }
      worst = std::max(worst, std::abs(out - in));
      if (i != d) worst = std::max(worst, std::abs(outp - inp));
    }
  }
  return worst;
}

}  // namespace sgpnet
