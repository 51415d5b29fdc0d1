#pragma once

#include <stdexcept>
#include <string>

namespace qel {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or violated precondition. Maps to CLI exit code 2.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what) {}
};

/// Work or memory beyond the configured limits. Maps to CLI exit code 3.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(what) {}
};

/// Projection of a state that has (numerically) no component in the image.
class DegenerateProjectionError : public Error {
 public:
  explicit DegenerateProjectionError(const std::string& what) : Error(what) {}
};

/// No codebook entry has nonzero fidelity with the query state.
class NoWitnessError : public Error {
 public:
  explicit NoWitnessError(const std::string& what) : Error(what) {}
};

/// A generator emitted output that breaks its declared contract
/// (wrong rank, not a projector, Cauchy bound violated).
class ContractViolationError : public Error {
 public:
  explicit ContractViolationError(const std::string& what) : Error(what) {}
};

}  // namespace qel
