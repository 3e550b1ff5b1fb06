#pragma once

#include <cmath>
#include <limits>

namespace sgpnet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CostEval {
  double value;
  double d1;
  double d2;
};

// Congestion-dependent cost of a link (argument in bits/s) or a CPU (workload).
// Linear: d*x. Queue: x/(mu-x), the M/M/1 mean occupancy, +inf at or past mu.
struct CostFn {
  enum class Kind { Linear, Queue };

  Kind kind = Kind::Linear;
  double param = 0.0;  // slope d for Linear, capacity mu for Queue

  static CostFn linear(double slope) { return {Kind::Linear, slope}; }
  static CostFn queue(double capacity) { return {Kind::Queue, capacity}; }

  CostEval eval(double x) const {
    if (kind == Kind::Linear) return {param * x, param, 0.0};
    if (x >= param) return {kInf, kInf, kInf};
    const double gap = param - x;
    return {x / gap, param / (gap * gap), 2.0 * param / (gap * gap * gap)};
  }
  double value(double x) const { return eval(x).value; }
  double d1(double x) const { return eval(x).d1; }

  // Largest x with value(x) <= budget.
  double level(double budget) const {
    if (kind == Kind::Linear) return param > 0.0 ? budget / param : kInf;
    if (!std::isfinite(budget)) return param;
    return param * budget / (1.0 + budget);
  }

  // sup of the second derivative over {x >= 0 : value(x) <= budget}.
  double curvature_bound(double budget) const {
    if (kind == Kind::Linear) return 0.0;
    if (!std::isfinite(budget)) return kInf;
    return eval(level(budget)).d2;
  }
};

}  // namespace sgpnet
