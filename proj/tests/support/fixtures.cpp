#include "fixtures.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sgpnet/scenario.hpp"
#include "sgpnet/sgp.hpp"

namespace fixtures {

Instance detour(double rho) {
  Instance in{NetworkSpec(4, 1), {}};
  auto& s = in.spec;
  for (int i = 0; i < 4; ++i) s.label[i] = i + 1;
  s.add_edge(0, 3, CostFn::linear(1.0));
  s.add_edge(0, 1, CostFn::linear(rho / 3.0));
  s.add_edge(1, 2, CostFn::linear(rho / 3.0));
  s.add_edge(2, 3, CostFn::linear(rho / 3.0));
  s.add_edge(1, 3, CostFn::linear(1.0));
  for (int i = 0; i < 3; ++i) s.comp_cost[i].reset();
  s.comp_cost[3] = CostFn::linear(0.0);
  s.finalize();
  in.tasks.tasks = {{3, 0}};
  in.tasks.data_size = {1.0};
  in.tasks.result_size = {1.0};
  in.tasks.rate = {{1.0, 0.0, 0.0, 0.0}};
  return in;
}

namespace {

Strategy towards(const Instance& in, const int next[3]) {
  Strategy st = Strategy::zeros(in.spec, in.tasks);
  for (int i = 0; i < 3; ++i) st.data[0][i][in.spec.slot_of(i, next[i]) + 1] = 1.0;
  st.data[0][3][0] = 1.0;
  for (int i = 0; i < 3; ++i) st.result[0][i][in.spec.slot_of(i, next[i])] = 1.0;
  return st;
}

}  // namespace

Strategy detour_direct(const Instance& in) {
  const int next[3] = {3, 3, 3};
  return towards(in, next);
}

Strategy detour_chain(const Instance& in) {
  const int next[3] = {1, 2, 3};
  return towards(in, next);
}

Instance random_small(std::uint64_t seed, int max_nodes, int max_tasks) {
  Rng rng(seed, 0x5eed);
  const int n = 3 + rng.below(max_nodes - 2);
  const int types = 2;
  Instance in{NetworkSpec(n, types), {}};
  auto& s = in.spec;

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (rng.uniform() < 0.3) pairs.push_back({i, j});
  std::vector<char> link_queue;
  for (auto [i, j] : pairs)
    for (int dir = 0; dir < 2; ++dir) {
      const bool q = rng.uniform() < 0.5;
      link_queue.push_back(q);
      const int a = dir ? j : i, b = dir ? i : j;
      s.add_link(a, b, q ? CostFn::queue(rng.uniform(1.0, 3.0)) : CostFn::linear(rng.uniform(0.2, 2.0)));
    }
  std::vector<char> cpu_queue(n);
  for (int i = 0; i < n; ++i) {
    cpu_queue[i] = rng.uniform() < 0.5;
    s.comp_cost[i] = cpu_queue[i] ? CostFn::queue(rng.uniform(1.0, 3.0)) : CostFn::linear(rng.uniform(0.2, 2.0));
    for (int m = 0; m < types; ++m) s.comp_weight[i][m] = rng.uniform(1.0, 3.0);
  }
  s.finalize();

  auto& t = in.tasks;
  t.data_size = {1.0, 1.0};
  t.result_size = {rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};
  const int K = 1 + rng.below(max_tasks);
  for (int k = 0; k < K; ++k) {
    Task task{rng.below(n), rng.below(types)};
    for (const auto& other : t.tasks)
      if (other.dest == task.dest && other.type == task.type) task.type = 1 - task.type;
    t.tasks.push_back(task);
    Vec r(n, 0.0);
    const int R = 1 + rng.below(2);
    for (int a = 0; a < R; ++a) r[rng.below(n)] = rng.uniform(0.2, 1.0);
    t.rate.push_back(r);
  }

  // Raise queue capacities until the local-compute start sits at <= 80%.
  for (int round = 0; round < 50; ++round) {
    const FlowState f = propagate(s, t, tree_strategy(s, t, true));
    bool changed = false;
    for (int e = 0; e < s.num_links(); ++e)
      if (link_queue[e] && f.F[e] > 0.8 * s.link_cost[e].param) {
        s.link_cost[e].param = f.F[e] / 0.8 * 1.01;
        changed = true;
      }
    for (int i = 0; i < n; ++i)
      if (cpu_queue[i] && f.G[i] > 0.8 * s.comp_cost[i]->param) {
        s.comp_cost[i]->param = f.G[i] / 0.8 * 1.01;
        changed = true;
      }
    if (!changed) break;
  }
  return in;
}

double fd_dT_dr(const Instance& in, const Strategy& s, int task, int node, double h) {
  TaskSet up = in.tasks, down = in.tasks;
  up.rate[task][node] += h;
  down.rate[task][node] -= h;
  return (propagate(in.spec, up, s).T - propagate(in.spec, down, s).T) / (2.0 * h);
}

double fd_dT_dtplus(const Instance& in, const Strategy& s, int task, int node, double h) {
  const auto& spec = in.spec;
  const int n = spec.n;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < spec.degree(i); ++j) B(spec.out_nbr[i][j], i) -= s.result[task][i][j];
  auto cost_with = [&](double extra) {
    FlowState f = propagate(spec, in.tasks, s);
    Eigen::VectorXd inj = Eigen::VectorXd::Zero(n);
    inj(node) = extra;
    const Eigen::VectorXd x = B.partialPivLu().solve(inj);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < spec.degree(i); ++j) f.f_plus[task][spec.out_link[i][j]] += x(i) * s.result[task][i][j];
    aggregate(spec, in.tasks, f);
    return f.T;
  };
  return (cost_with(h) - cost_with(-h)) / (2.0 * h);
}

namespace {

void compositions(int slots, int units, Vec& cur, int pos, std::vector<Vec>& out, double step) {
  if (pos == slots - 1) {
    cur[pos] = units * step;
    out.push_back(cur);
    return;
  }
  for (int a = 0; a <= units; ++a) {
    cur[pos] = a * step;
    compositions(slots, units - a, cur, pos + 1, out, step);
  }
}

}  // namespace

void for_each_grid_strategy(const Instance& in, double step, const std::function<void(const Strategy&)>& fn) {
  const int units = static_cast<int>(std::lround(1.0 / step));
  struct Row {
    bool result;
    int node;
    std::vector<Vec> options;
  };
  std::vector<Row> rows;
  for (int i = 0; i < in.spec.n; ++i) {
    const int slots = 1 + in.spec.degree(i);
    Vec cur(slots);
    Row r{false, i, {}};
    compositions(slots, units, cur, 0, r.options, step);
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < in.spec.n; ++i) {
    if (i == in.tasks.tasks[0].dest) continue;
    const int slots = in.spec.degree(i);
    Vec cur(slots);
    Row r{true, i, {}};
    compositions(slots, units, cur, 0, r.options, step);
    rows.push_back(std::move(r));
  }
  Strategy s = Strategy::zeros(in.spec, in.tasks);
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (idx == rows.size()) {
      if (detect_loops(in.spec, in.tasks, s).loop_free()) fn(s);
      return;
    }
    const Row& r = rows[idx];
    for (const Vec& opt : r.options) {
      (r.result ? s.result[0][r.node] : s.data[0][r.node]) = opt;
      rec(idx + 1);
    }
  };
  rec(0);
}

}  // namespace fixtures
