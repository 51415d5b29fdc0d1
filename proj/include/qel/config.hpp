#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "qel/errors.hpp"

namespace qel {

/// Numerical tolerances used throughout the library. Kept in one record so
/// the property tests and the implementation always agree on them.
struct Tolerances {
  double norm = 1e-12;      // unit-vector norm deviation
  double algebra = 1e-9;    // Hermiticity, idempotency, trace identities
  double spectral = 1e-7;   // eigenvalue distance from {0,1}
};

inline constexpr Tolerances tol{};

namespace detail {

inline std::int64_t env_max_dim() {
  if (const char* s = std::getenv("QEL_MAX_DIM")) {
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return v;
  }
  return 16384;  // n <= 14 qubits, dense
}

inline std::atomic<std::int64_t>& max_dim_slot() {
  static std::atomic<std::int64_t> slot{env_max_dim()};
  return slot;
}

}  // namespace detail

/// Largest dense matrix dimension the library will materialize.
/// Defaults to 16384 and can be overridden with QEL_MAX_DIM.
inline std::int64_t max_dim() { return detail::max_dim_slot().load(); }

inline void set_max_dim(std::int64_t dim) {
  if (dim < 1) throw ArgumentError("max_dim must be positive");
  detail::max_dim_slot().store(dim);
}

inline void check_dim(std::int64_t dim, const std::string& what) {
  if (dim > max_dim()) {
    throw ResourceError(what + ": dimension " + std::to_string(dim) +
                        " exceeds limit " + std::to_string(max_dim()) +
                        " (QEL_MAX_DIM)");
  }
}

}  // namespace qel
