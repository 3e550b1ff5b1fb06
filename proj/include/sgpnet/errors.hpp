#pragma once

#include <stdexcept>
#include <string>

namespace sgpnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cycle in a per-task support graph.
struct LoopError : Error { using Error::Error; };
// No feasible point (every coordinate blocked, capacity exhausted, ...).
struct InfeasibleError : Error { using Error::Error; };
// No loop-free starting strategy with finite cost.
struct InitError : Error { using Error::Error; };
// An injected event left some demand without a route.
struct InfeasibleAfterEvent : Error { using Error::Error; };
// Flow-to-strategy mapping is undefined because some traffic is zero.
struct DegenerateError : Error { using Error::Error; };
// Bad generator or preset parameters.
struct ParamError : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace sgpnet
