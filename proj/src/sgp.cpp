#include "sgpnet/sgp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "sgpnet/errors.hpp"
#include "sgpnet/optimality.hpp"
#include "sgpnet/paths.hpp"

namespace sgpnet {

Curvature curvature_bounds(const NetworkSpec& spec, double T0) {
  Curvature c;
  c.link.resize(spec.num_links());
  c.cpu.assign(spec.n, 0.0);
  for (int e = 0; e < spec.num_links(); ++e) {
    c.link[e] = spec.link_cost[e].curvature_bound(T0);
    c.A = std::max(c.A, c.link[e]);
  }
  for (int i = 0; i < spec.n; ++i)
    if (spec.comp_cost[i]) {
      c.cpu[i] = spec.comp_cost[i]->curvature_bound(T0);
      c.A = std::max(c.A, c.cpu[i]);
    }
  return c;
}

Curvature local_curvature(const NetworkSpec& spec, const FlowState& flow) {
  Curvature c;
  c.link.resize(spec.num_links());
  c.cpu.assign(spec.n, 0.0);
  for (int e = 0; e < spec.num_links(); ++e) {
    c.link[e] = spec.link_cost[e].eval(flow.F[e]).d2;
    c.A = std::max(c.A, c.link[e]);
  }
  for (int i = 0; i < spec.n; ++i)
    if (spec.comp_cost[i]) {
      c.cpu[i] = spec.comp_cost[i]->eval(flow.G[i]).d2;
      c.A = std::max(c.A, c.cpu[i]);
    }
  return c;
}

void add_downstream(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, Curvature& curv) {
  const int K = tasks.size();
  curv.down_minus.assign(K, Vec(spec.n, 0.0));
  curv.down_plus.assign(K, Vec(spec.n, 0.0));
  for (int k = 0; k < K; ++k) {
    const double Lm = tasks.data_len(k), Lp = tasks.result_len(k);
    const int type = tasks.tasks[k].type;
    auto& hp = curv.down_plus[k];
    auto order = support_order(spec, s, k, false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      if (i == tasks.tasks[k].dest) continue;
      double acc = 0.0;
      for (int j = 0; j < spec.degree(i); ++j) {
        const double p = s.result[k][i][j];
        if (p > 0.0) acc += p * (Lp * Lp * curv.link[spec.out_link[i][j]] + hp[spec.out_nbr[i][j]]);
      }
      hp[i] = acc;
    }
    auto& hm = curv.down_minus[k];
    order = support_order(spec, s, k, true);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int i = *it;
      const Vec& row = s.data[k][i];
      double acc = 0.0;
      if (row[0] > 0.0) {
        const double w = spec.comp_weight[i].empty() ? 1.0 : spec.comp_weight[i][type];
        acc += row[0] * (w * w * curv.cpu[i] + hp[i]);
      }
      for (int j = 0; j < spec.degree(i); ++j) {
        const double p = row[j + 1];
        if (p > 0.0) acc += p * (Lm * Lm * curv.link[spec.out_link[i][j]] + hm[spec.out_nbr[i][j]]);
      }
      hm[i] = acc;
    }
  }
}

namespace {

struct RowRef {
  int task;
  int node;
  bool result;
};

const Vec& row_of(const Strategy& s, const RowRef& r) {
  return r.result ? s.result[r.task][r.node] : s.data[r.task][r.node];
}
Vec& row_of(Strategy& s, const RowRef& r) { return r.result ? s.result[r.task][r.node] : s.data[r.task][r.node]; }

std::vector<char> effective_blocked(const MarginalState& m, const RunConfig& cfg, const RowRef& r) {
  std::vector<char> b = r.result ? m.blocked_plus[r.task][r.node] : m.blocked_minus[r.task][r.node];
  const auto& allowed = r.result ? cfg.allowed_plus : cfg.allowed_minus;
  if (allowed) {
    const auto& a = (*allowed)[r.task][r.node];
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!a[j]) b[j] = 1;
  }
  return b;
}

// Curvature is taken in the row's own flow units: link terms scale with the
// squared packet length and the CPU term with the squared computation weight.
Vec sgp_diag(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, const MarginalState& m,
             const Curvature& curv, const RowRef& r, const std::vector<char>& blocked) {
  const int k = r.task, i = r.node;
  const bool swept = !curv.down_minus.empty();
  // The swept downstream term is already per slot; the free-slot multiplier
  // only pads the coarse hop-count bound.
  const int free = swept ? 1 : static_cast<int>(std::count(blocked.begin(), blocked.end(), 0));
  const double Lm = tasks.data_len(k), Lp = tasks.result_len(k);
  const double w = spec.comp_weight[i].empty() ? 1.0 : spec.comp_weight[i][tasks.tasks[k].type];
  const double scale = std::max({Lm, Lp, w});
  auto down_plus = [&](int j) { return swept ? curv.down_plus[k][j] : m.h_plus[k][j] * Lp * Lp * curv.A; };
  auto down_minus = [&](int j) {
    return swept ? curv.down_minus[k][j] : m.h_minus[k][j] * scale * scale * curv.A;
  };
  Vec M(blocked.size(), 0.0);
  if (r.result) {
    const double half_t = 0.5 * flow.t_plus[k][i];
    for (int j = 0; j < spec.degree(i); ++j)
      if (!blocked[j])
        M[j] = half_t * (Lp * Lp * curv.link[spec.out_link[i][j]] + free * down_plus(spec.out_nbr[i][j]));
  } else {
    const double half_t = 0.5 * flow.t_minus[k][i];
    if (!blocked[0]) {
      const double d = swept ? curv.down_plus[k][i] : m.h_plus[k][i] * scale * scale * curv.A;
      M[0] = half_t * (w * w * curv.cpu[i] + free * d);
    }
    for (int j = 0; j < spec.degree(i); ++j)
      if (!blocked[j + 1])
        M[j + 1] = half_t * (Lm * Lm * curv.link[spec.out_link[i][j]] + free * down_minus(spec.out_nbr[i][j]));
  }
  return M;
}

Vec gp_diag(const FlowState& flow, const MarginalState& m, const RowRef& r, const std::vector<char>& blocked,
            double beta) {
  const Vec& delta = r.result ? m.delta_plus[r.task][r.node] : m.delta_minus[r.task][r.node];
  const double t = r.result ? flow.t_plus[r.task][r.node] : flow.t_minus[r.task][r.node];
  Vec M(blocked.size(), 0.0);
  int best = -1;
  for (std::size_t j = 0; j < blocked.size(); ++j)
    if (!blocked[j]) {
      M[j] = t / beta;
      if (best < 0 || delta[j] < delta[best]) best = static_cast<int>(j);
    }
  if (best >= 0) M[best] = 0.0;
  return M;
}

Vec propose(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, const MarginalState& m, const Curvature& curv,
            const RunConfig& cfg, const Strategy& s, const RowRef& r) {
  const auto blocked = effective_blocked(m, cfg, r);
  const Vec& delta = r.result ? m.delta_plus[r.task][r.node] : m.delta_minus[r.task][r.node];
  // A row without traffic has no cost influence: jump to the cheapest vertex.
  const double t = r.result ? flow.t_plus[r.task][r.node] : flow.t_minus[r.task][r.node];
  if (t == 0.0) {
    int best = -1;
    for (std::size_t j = 0; j < blocked.size(); ++j)
      if (!blocked[j] && (best < 0 || delta[j] < delta[best])) best = static_cast<int>(j);
    if (best < 0) throw InfeasibleError("every coordinate of the row is blocked");
    Vec v(blocked.size(), 0.0);
    v[best] = 1.0;
    return v;
  }
  const Vec M = cfg.method == Method::SGP ? sgp_diag(spec, tasks, flow, m, curv, r, blocked)
                                          : gp_diag(flow, m, r, blocked, cfg.gp_beta);
  return simplex_qp(row_of(s, r), delta, M, blocked, cfg.gp_beta);
}

// Drops proposals whose new support would close a loop together with rows
// that are already accepted. Zero-traffic rows may keep uphill support, so the
// blocked sets alone do not rule this out.
std::vector<std::pair<RowRef, Vec>> loop_safe(const NetworkSpec& spec, const Strategy& s,
                                              const std::vector<std::pair<RowRef, Vec>>& cand) {
  std::vector<std::pair<RowRef, Vec>> kept;
  Strategy support = s;
  for (const auto& [r, v] : cand) {
    const Vec& old = row_of(s, r);
    const std::size_t first = r.result ? 0 : 1;
    bool grows = false;
    for (std::size_t j = first; j < v.size(); ++j)
      if (old[j] == 0.0 && v[j] > 0.0) grows = true;
    if (!grows) {
      kept.push_back({r, v});
      continue;
    }
    Vec& row = row_of(support, r);
    const Vec saved = row;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] = 0.5 * (old[j] + v[j]);
    try {
      support_order(spec, support, r.task, !r.result);
      kept.push_back({r, v});
    } catch (const LoopError&) {
      row = saved;
    }
  }
  return kept;
}

// Moves the given rows toward their proposals, halving the displacement until
// the cost does not increase. Returns false if no trial was accepted.
bool safeguarded_move(const NetworkSpec& spec, const TaskSet& tasks, Strategy& s, FlowState& flow,
                      const std::vector<std::pair<RowRef, Vec>>& all) {
  const auto safe = loop_safe(spec, s, all);
  // Zero-traffic rows do not change any flow, so they always take the full step.
  std::vector<std::pair<RowRef, Vec>> cand;
  for (const auto& [r, v] : safe) {
    const double t = r.result ? flow.t_plus[r.task][r.node] : flow.t_minus[r.task][r.node];
    if (t == 0.0)
      row_of(s, r) = v;
    else
      cand.push_back({r, v});
  }
  bool moved = false;
  for (const auto& [r, v] : cand)
    if (v != row_of(s, r)) moved = true;
  if (!moved) return true;
  double step = 1.0;
  for (int h = 0; h <= 30; ++h, step *= 0.5) {
    Strategy trial = s;
    for (const auto& [r, v] : cand) {
      Vec& row = row_of(trial, r);
      const Vec& old = row_of(s, r);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = old[j] + step * (v[j] - old[j]);
    }
    snap(trial);
    FlowState f;
    try {
      f = propagate(spec, tasks, trial);
    } catch (const LoopError&) {
      continue;
    }
    if (f.T <= flow.T) {
      s = std::move(trial);
      flow = std::move(f);
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<RowUpdate> propose_all(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s,
                                   const FlowState& flow, const MarginalState& m, const Curvature& curv,
                                   const RunConfig& cfg) {
  std::vector<std::pair<RowRef, Vec>> cand;
  for (int i = 0; i < spec.n; ++i)
    for (bool result : {false, true})
      for (int k = 0; k < tasks.size(); ++k) {
        if (result && i == tasks.tasks[k].dest) continue;
        const RowRef r{k, i, result};
        cand.push_back({r, propose(spec, tasks, flow, m, curv, cfg, s, r)});
      }
  std::vector<RowUpdate> out;
  for (auto& [r, v] : loop_safe(spec, s, cand)) out.push_back({r.task, r.node, r.result, std::move(v)});
  return out;
}

Vec scaling_matrix(const NetworkSpec& spec, const TaskSet& tasks, const FlowState& flow, const MarginalState& m,
                   const Curvature& curv, int task, int node, bool result) {
  const RowRef r{task, node, result};
  return sgp_diag(spec, tasks, flow, m, curv, r, result ? m.blocked_plus[task][node] : m.blocked_minus[task][node]);
}

Vec gp_scaling(const NetworkSpec&, const TaskSet&, const FlowState& flow, const MarginalState& m, int task,
               int node, bool result, double beta) {
  const RowRef r{task, node, result};
  return gp_diag(flow, m, r, result ? m.blocked_plus[task][node] : m.blocked_minus[task][node], beta);
}

Vec simplex_qp(const Vec& phi, const Vec& delta, const Vec& M_in, const std::vector<char>& blocked, double gp_beta) {
  const std::size_t n = phi.size();
  std::vector<int> freej;
  for (std::size_t j = 0; j < n; ++j)
    if (!blocked[j]) freej.push_back(static_cast<int>(j));
  if (freej.empty()) throw InfeasibleError("every coordinate of the row is blocked");

  // Curvature too small to resolve against the delta magnitudes acts as zero.
  Vec M = M_in;
  double dmax = 0.0;
  for (int j : freej) dmax = std::max(dmax, std::abs(delta[j]));
  for (int j : freej)
    if (M[j] < 1e-12 * (1.0 + dmax)) M[j] = 0.0;
  const bool flat = std::all_of(freej.begin(), freej.end(), [&](int j) { return M[j] == 0.0; });
  if (flat) {
    int best = freej[0];
    for (int j : freej)
      if (delta[j] < delta[best]) best = j;
    for (int j : freej) M[j] = j == best ? 0.0 : 1.0 / gp_beta;
  }

  // Coordinates without curvature: only the cheapest may take mass.
  int zbest = -1;
  for (int j : freej)
    if (M[j] == 0.0 && (zbest < 0 || delta[j] < delta[zbest])) zbest = j;

  auto v_at = [&](double lambda, Vec& v) {
    double sum = 0.0;
    for (int j : freej) {
      if (M[j] == 0.0) continue;
      v[j] = std::max(0.0, phi[j] + (lambda - delta[j]) / (2.0 * M[j]));
      sum += v[j];
    }
    return sum;
  };

  Vec v(n, 0.0);
  if (zbest >= 0) {
    const double s = v_at(delta[zbest], v);
    if (s <= 1.0) {
      v[zbest] = 1.0 - s;
      return v;
    }
    std::fill(v.begin(), v.end(), 0.0);
  }

  // Solve sum_j max(0, (lambda - b_j)/(2 M_j)) = 1 with b_j = delta_j - 2 M_j phi_j.
  std::vector<std::pair<double, int>> bp;
  for (int j : freej)
    if (M[j] > 0.0) bp.push_back({delta[j] - 2.0 * M[j] * phi[j], j});
  std::sort(bp.begin(), bp.end());
  double slope = 0.0, offset = 0.0, lambda = 0.0;
  for (std::size_t a = 0; a < bp.size(); ++a) {
    const double w = 1.0 / (2.0 * M[bp[a].second]);
    slope += w;
    offset += w * bp[a].first;
    lambda = (1.0 + offset) / slope;
    if (a + 1 == bp.size() || lambda <= bp[a + 1].first) break;
  }
  v_at(lambda, v);
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

Strategy sgp_step(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, const FlowState& flow,
                  const MarginalState& m, const Curvature& curv, const RunConfig& cfg, int node, int task,
                  bool result) {
  const RowRef r{task, node, result};
  Strategy out = s;
  if (result && node == tasks.tasks[task].dest) return out;
  FlowState f = flow;
  safeguarded_move(spec, tasks, out, f, {{r, propose(spec, tasks, flow, m, curv, cfg, s, r)}});
  return out;
}

Strategy tree_strategy(const NetworkSpec& spec, const TaskSet& tasks, bool local) {
  Strategy s = Strategy::zeros(spec, tasks);
  const Vec w = zero_flow_slopes(spec);
  for (int k = 0; k < tasks.size(); ++k) {
    const int d = tasks.tasks[k].dest;
    Vec wr = w, wd = w;
    for (double& x : wr) x *= tasks.result_len(k);
    for (double& x : wd) x *= tasks.data_len(k);
    const PathTree rt = tree_to(spec, d, wr);
    for (int i = 0; i < spec.n; ++i)
      if (i != d && rt.next[i] >= 0) s.result[k][i][spec.slot_of(i, rt.next[i])] = 1.0;

    Vec label = zero_flow_cpu(spec, tasks.tasks[k].type);
    for (int i = 0; i < spec.n; ++i) label[i] += rt.dist[i];
    const PathTree ft = shortest_tree(spec, label, wd);
    for (int i = 0; i < spec.n; ++i) {
      auto& row = s.data[k][i];
      if ((local && spec.has_cpu(i)) || (ft.next[i] < 0 && spec.has_cpu(i)))
        row[0] = 1.0;
      else if (ft.next[i] >= 0)
        row[1 + spec.slot_of(i, ft.next[i])] = 1.0;
    }
  }
  return s;
}

namespace {

// Largest load-to-capacity ratio over queue-cost links and CPUs.
double utilization(const NetworkSpec& spec, const FlowState& f) {
  double u = 0.0;
  auto load = [&](const CostFn& c, double x) {
    if (c.kind != CostFn::Kind::Queue || x <= 0.0) return;
    u = std::max(u, c.param > 0.0 ? x / c.param : kInf);
  };
  for (int e = 0; e < spec.num_links(); ++e) load(spec.link_cost[e], f.F[e]);
  for (int i = 0; i < spec.n; ++i) {
    if (spec.comp_cost[i])
      load(*spec.comp_cost[i], f.G[i]);
    else if (f.G[i] > 0.0)
      u = kInf;
  }
  return u;
}

TaskSet scaled(const TaskSet& tasks, double c) {
  TaskSet out = tasks;
  for (auto& row : out.rate)
    for (double& r : row) r *= c;
  return out;
}

// Optimizes at a fraction c of the input rates, then raises c by the larger
// of two rules: leave 5% headroom on the busiest resource, or go halfway to
// the scale at which the new strategy saturates. Stops once the full rates
// have finite cost, or when c stops growing.
Strategy rate_homotopy(const NetworkSpec& spec, const TaskSet& tasks) {
  constexpr double kHeadroom = 0.95;
  Strategy s;
  double u = kInf;
  for (bool local : {true, false}) {
    Strategy t = tree_strategy(spec, tasks, local);
    const double ut = utilization(spec, propagate(spec, tasks, t));
    if (ut < u) u = ut, s = std::move(t);
  }
  if (!std::isfinite(u)) throw InitError("every starting tree loads a zero-capacity resource");
  double c = std::min(1.0, kHeadroom / u);
  int stalls = 0;
  for (int stage = 0; stage < 200; ++stage) {
    if (c >= 1.0 && std::isfinite(propagate(spec, tasks, s).T)) return s;
    RunConfig cfg;
    cfg.max_iters = 100;
    cfg.tol = 1e-3;
    cfg.check_invariants = false;
    s = run(spec, scaled(tasks, c), s, cfg).strategy;
    u = utilization(spec, propagate(spec, tasks, s));
    double next = std::max(std::min(1.0, kHeadroom / u), c + 0.5 * (1.0 / u - c));
    if (u < 1.0) next = 1.0;
    if (next <= c * (1.0 + 1e-4)) {
      if (++stalls >= 5) break;
    } else {
      stalls = 0;
      c = next;
    }
  }
  if (std::isfinite(propagate(spec, tasks, s).T)) return s;
  throw InitError("no strategy with finite cost found at the full input rates");
}

}  // namespace

Strategy default_init(const NetworkSpec& spec, const TaskSet& tasks) {
  for (bool local : {true, false}) {
    Strategy s = tree_strategy(spec, tasks, local);
    if (std::isfinite(propagate(spec, tasks, s).T)) return s;
  }
  return rate_homotopy(spec, tasks);
}

namespace {

struct Instance {
  NetworkSpec spec;
  TaskSet tasks;
  Strategy s;
};

Instance apply_failure(const NetworkSpec& spec, const TaskSet& tasks, const Strategy& s, int label) {
  int v = -1;
  for (int i = 0; i < spec.n; ++i)
    if (spec.label[i] == label) v = i;
  if (v < 0) throw InfeasibleAfterEvent("failed node " + std::to_string(label) + " is not in the network");
  Reduced red = remove_node(spec, tasks, v);
  if (!strongly_connected(red.spec)) throw InfeasibleAfterEvent("network disconnected by failure");

  Instance out{red.spec, red.tasks, Strategy::zeros(red.spec, red.tasks)};
  Strategy fresh;
  try {
    fresh = default_init(out.spec, out.tasks);
  } catch (const InitError& e) {
    throw InfeasibleAfterEvent(e.what());
  }
  for (int k = 0; k < out.tasks.size(); ++k) {
    const int ok = red.kept_task[k];
    bool touched = false;
    for (int i = 0; i < spec.n; ++i) {
      const int ni = red.node_map[i];
      if (ni < 0) continue;
      auto& dm = out.s.data[k][ni];
      auto& dp = out.s.result[k][ni];
      dm[0] = s.data[ok][i][0];
      for (int j = 0; j < spec.degree(i); ++j) {
        const int nj = red.node_map[spec.out_nbr[i][j]];
        if (nj < 0) {
          if (s.data[ok][i][j + 1] > 0.0 || s.result[ok][i][j] > 0.0) touched = true;
          continue;
        }
        const int slot = out.spec.slot_of(ni, nj);
        dm[slot + 1] = s.data[ok][i][j + 1];
        dp[slot] = s.result[ok][i][j];
      }
    }
    if (touched) {
      out.s.data[k] = fresh.data[k];
      out.s.result[k] = fresh.result[k];
    }
  }
  if (!std::isfinite(propagate(out.spec, out.tasks, out.s).T)) out.s = fresh;
  return out;
}

}  // namespace

RunResult run(const NetworkSpec& spec_in, const TaskSet& tasks_in, const Strategy& init, const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (!cfg.events.empty() && (cfg.allowed_minus || cfg.allowed_plus))
    throw ConfigError("events cannot be combined with restricted variables");

  RunResult res;
  res.spec = spec_in;
  res.tasks = tasks_in;
  res.strategy = init;
  snap(res.strategy);
  FlowState flow = propagate(res.spec, res.tasks, res.strategy);
  if (!std::isfinite(flow.T)) throw InitError("initial strategy has infinite cost");
  Curvature curv = curvature_bounds(res.spec, flow.T);

  auto events = cfg.events;
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.iter < b.iter; });
  std::size_t next_event = 0;

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> last_update;
  int rr_cursor = 0;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    bool event_now = false;
    while (next_event < events.size() && events[next_event].iter <= it) {
      Instance ni = apply_failure(res.spec, res.tasks, res.strategy, events[next_event].node);
      res.spec = std::move(ni.spec);
      res.tasks = std::move(ni.tasks);
      res.strategy = std::move(ni.s);
      flow = propagate(res.spec, res.tasks, res.strategy);
      if (!std::isfinite(flow.T)) throw InfeasibleAfterEvent("no finite-cost strategy after failure");
      curv = curvature_bounds(res.spec, flow.T);
      last_update.clear();
      event_now = true;
      ++next_event;
    }

    const MarginalState m = compute_marginals(res.spec, res.tasks, res.strategy, flow);
    if (cfg.curvature == Curvature_mode::CurrentCost) curv = curvature_bounds(res.spec, flow.T);
    if (cfg.curvature == Curvature_mode::Local) {
      curv = local_curvature(res.spec, flow);
      add_downstream(res.spec, res.tasks, res.strategy, curv);
    }
    res.residual = sufficient_residual(res.spec, res.tasks, res.strategy, m,
                                       cfg.allowed_minus ? &*cfg.allowed_minus : nullptr,
                                       cfg.allowed_plus ? &*cfg.allowed_plus : nullptr);
    TraceRecord rec{it, flow.T, res.residual, -1, event_now, 0.0};
    res.iterations = it;

    if (!res.trace.empty() && !event_now && flow.T > res.trace.back().T) res.monotone = false;
    const bool pending = next_event < events.size();
    if (res.residual < cfg.tol && !pending) {
      res.converged = true;
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      res.trace.push_back(rec);
      break;
    }
    if (it == cfg.max_iters) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      res.trace.push_back(rec);
      break;
    }

    const int K = res.tasks.size(), n = res.spec.n;
    std::vector<std::pair<int, int>> pairs;  // (node, task)
    if (cfg.schedule == Schedule::Synchronous) {
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k) pairs.push_back({i, k});
    } else if (cfg.schedule == Schedule::RoundRobinAsync) {
      const int p = rr_cursor++ % (n * K);
      pairs.push_back({p / K, p % K});
      rec.node = p / K;
    } else {
      const int N = n * K;
      if (static_cast<int>(last_update.size()) != N) last_update.assign(N, it - 1);
      const int pick = static_cast<int>(rng() % static_cast<std::uint64_t>(N));
      pairs.push_back({pick / K, pick % K});
      for (int p = 0; p < N; ++p)
        if (p != pick && it - last_update[p] >= N) pairs.push_back({p / K, p % K});
      for (const auto& [i, k] : pairs) last_update[i * K + k] = it;
      rec.node = pick / K;
    }

    // Synchronous order: ascending node id, data rows before result rows.
    std::vector<std::pair<RowRef, Vec>> cand;
    for (const auto& [i, k] : pairs) cand.push_back({RowRef{k, i, false}, {}});
    for (const auto& [i, k] : pairs)
      if (i != res.tasks.tasks[k].dest) cand.push_back({RowRef{k, i, true}, {}});
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first.node, a.first.result, a.first.task) < std::tie(b.first.node, b.first.result, b.first.task);
    });
    for (auto& [r, v] : cand) v = propose(res.spec, res.tasks, flow, m, curv, cfg, res.strategy, r);

    safeguarded_move(res.spec, res.tasks, res.strategy, flow, cand);
    if (cfg.check_invariants && !detect_loops(res.spec, res.tasks, res.strategy).loop_free()) res.loop_free = false;
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    res.trace.push_back(rec);
  }
  res.flow = propagate(res.spec, res.tasks, res.strategy);
  return res;
}

}  // namespace sgpnet
