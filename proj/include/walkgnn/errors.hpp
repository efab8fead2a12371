#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace walkgnn {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input (edge lists). Carries the 1-based offending line.
struct ParseError : Error {
  ParseError(std::size_t line_number, const std::string& what)
      : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
  std::size_t line;
};

// Structural violations in multi-graph (TU-style) inputs.
struct FormatError : Error {
  using Error::Error;
};

// Invalid parameters to a synthetic-graph generator or a constructor.
struct ConstructionError : Error {
  using Error::Error;
};

// Matrix/vector dimension mismatch.
struct DimensionError : Error {
  using Error::Error;
};

// Exact walk count exceeded 64-bit range; names the node and length.
struct WalkOverflowError : Error {
  WalkOverflowError(std::uint32_t v, std::size_t k)
      : Error("walk count overflow at node " + std::to_string(v) + ", length " +
              std::to_string(k)),
        node(v), length(k) {}
  std::uint32_t node;
  std::size_t length;
};

// Brute-force enumeration exceeded its step budget.
struct BudgetError : Error {
  using Error::Error;
};

// A node with an empty neighborhood where the update equation needs one.
struct IsolatedNodeError : Error {
  explicit IsolatedNodeError(std::uint32_t v)
      : Error("node " + std::to_string(v) + " is isolated; aggregation over N(v) is undefined"),
        node(v) {}
  std::uint32_t node;
};

// Power iteration failed to converge; carries the last estimate and residual.
struct ConvergenceError : Error {
  ConvergenceError(double estimate, double res)
      : Error("power iteration did not converge (last estimate " + std::to_string(estimate) +
              ", residual " + std::to_string(res) + ")"),
        last_estimate(estimate), residual(res) {}
  double last_estimate;
  double residual;
};

// An operation was invoked outside its contract (wrong model kind, mismatched
// walk table, conflicting options).
struct UsageError : Error {
  using Error::Error;
};

}  // namespace walkgnn
