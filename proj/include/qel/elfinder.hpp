#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qel/codec.hpp"
#include "qel/errors.hpp"
#include "qel/qcore.hpp"
#include "qel/rng.hpp"

namespace qel {

/// Parameters of the simple-state search.
///
/// n is the qubit count, m the rank exponent (the target projector has rank
/// >= 2^m), d the confidence knob: the certified overlap threshold is
/// 2^{m-n-1} and the sample budget N = d * 2^{2(n-m)+1} drives the Hoeffding
/// bound for the mean overlap below exp(-d).
struct ElSearchConfig {
  int n = 0;
  int m = 0;
  int d = 1;
  int precision_bits = 0;  // 0 = default n + d + 8
  std::uint64_t seed = 0;
  std::int64_t max_samples = std::int64_t{1} << 24;
  bool best_of_n = false;  // experiment mode: scan the full budget,
                           // return the best overlap instead of the first hit

  void validate() const {
    if (n < 1 || n > 30) throw ArgumentError("ElSearchConfig: n out of range");
    if (m < 0 || m >= n) throw ArgumentError("ElSearchConfig: need 0 <= m < n");
    if (d < 1) throw ArgumentError("ElSearchConfig: need d >= 1");
    const int p = effective_precision();
    if (p < 2 || p > 52) {
      throw ArgumentError("ElSearchConfig: precision_bits out of range");
    }
  }

  /// Default keeps rounding-induced fidelity loss below half the
  /// certification slack.
  int effective_precision() const {
    return precision_bits > 0 ? precision_bits : n + d + 8;
  }

  double threshold() const { return std::exp2(m - n - 1); }
};

/// One-sided Hoeffding bound for the mean of N overlap values in [0,1]
/// dropping t = 2^{m-n-1} below its expectation 2^{m-n}: exp(-2 N t^2).
inline double hoeffding_tail(std::int64_t n_samples, int n, int m) {
  if (n_samples < 1) throw ArgumentError("hoeffding_tail: need N >= 1");
  if (m < 0 || m >= n) throw ArgumentError("hoeffding_tail: need 0 <= m < n");
  const double t = std::exp2(m - n - 1);
  return std::exp(-2.0 * static_cast<double>(n_samples) * t * t);
}

/// N = ceil(d * 2^{2(n-m)+1}); substituting into the tail bound gives
/// exp(-2 N 2^{2(m-n)-2}) = exp(-d) exactly.
inline std::int64_t sample_budget(const ElSearchConfig& config) {
  config.validate();
  const int shift = 2 * (config.n - config.m) + 1;
  if (shift >= 62) throw ResourceError("sample_budget: budget overflow");
  const __int128 n = static_cast<__int128>(config.d) << shift;
  if (n > config.max_samples) {
    const std::string required =
        n <= INT64_MAX ? std::to_string(static_cast<std::int64_t>(n))
                       : std::to_string(static_cast<double>(n));
    throw ResourceError("sample_budget: required N = " + required +
                        " exceeds the sample cap " +
                        std::to_string(config.max_samples));
  }
  return static_cast<std::int64_t>(n);
}

/// Nearest dyadic rational state: every real component rounds to the grid
/// 2^{-precision_bits}, stored unreduced so that all states rationalized at
/// the same precision share one encoding length. Fidelity to the input is
/// at least 1 - 2^{n+2-2p}.
inline ElementaryState rationalize(const PureState& psi, int precision_bits) {
  if (precision_bits < 2 || precision_bits > 52) {
    throw ArgumentError("rationalize: precision_bits in [2, 52]");
  }
  const std::int64_t den = std::int64_t{1} << precision_bits;
  const double scale = static_cast<double>(den);
  std::vector<ComplexRational> amps(psi.dim());
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    const Complex c = psi.amplitudes()(i);
    amps[i].re = Rational(std::llround(c.real() * scale), den);
    amps[i].im = Rational(std::llround(c.imag() * scale), den);
  }
  return ElementaryState(psi.n_qubits(), std::move(amps));
}

/// Certified output of the search: the rationalized sample, its normalized
/// image under the projector, the certified overlap >= 2^{m-n-1}, and the
/// complexity bound of the image state over the sample codebook.
struct SimpleStateWitness {
  ElementaryState sampled;
  PureState image_state;
  double overlap = 0.0;
  std::int64_t samples_used = 0;
  ComplexityEstimate h_hat_bound;
  double log2_budget = 0.0;
  double approx_slack = 0.0;  // nonzero on the computable-projection path
};

/// Diagnostic payload when no sample reaches the threshold.
struct MissReport {
  double best_overlap = 0.0;
  double threshold = 0.0;
  std::int64_t samples_used = 0;
  std::optional<ElementaryState> best_sampled;
  std::optional<ComplexityEstimate> h_hat_bound;
};

class ThresholdMissError : public Error {
 public:
  ThresholdMissError(const std::string& what, MissReport report)
      : Error(what), report_(std::move(report)) {}
  const MissReport& report() const { return report_; }

 private:
  MissReport report_;
};

namespace detail {

/// The N-sample stream is split into fixed shards of 64 samples; shard w is
/// generated from Rng(seed + w). "First hit" is defined by stream position,
/// so any parallel shard schedule reproduces the sequential result.
constexpr std::int64_t kShardSize = 64;

class SampleStream {
 public:
  SampleStream(int n, int precision, std::uint64_t seed)
      : n_(n), precision_(precision), seed_(seed) {}

  /// Sequential generation; index must advance by exactly one per call.
  ElementaryState next(std::int64_t index) {
    if (index % kShardSize == 0 || !rng_) {
      rng_.emplace(seed_ + static_cast<std::uint64_t>(index / kShardSize));
    }
    return rationalize(haar_sample(n_, *rng_), precision_);
  }

  /// Random access used to re-materialize one sample; costs at most one
  /// shard of re-generation.
  ElementaryState at(std::int64_t index) const {
    Rng rng(seed_ + static_cast<std::uint64_t>(index / kShardSize));
    for (std::int64_t i = 0; i < index % kShardSize; ++i) {
      haar_sample(n_, rng);
    }
    return rationalize(haar_sample(n_, rng), precision_);
  }

 private:
  int n_;
  int precision_;
  std::uint64_t seed_;
  std::optional<Rng> rng_;
};

inline void check_image_invariant(const Projector& p, const PureState& phi) {
  const Vector residual = p.matrix() * phi.amplitudes() - phi.amplitudes();
  if (residual.cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("find_simple_state: image state fails P phi = phi");
  }
}

}  // namespace detail

/// Draws up to N = sample_budget(config) Haar samples, rationalizes each,
/// and returns the first whose overlap with P reaches 2^{m-n-1}, together
/// with its normalized image state. The complexity bound of the image is
/// minimized over the codebook of all N rationalized samples, evaluated
/// streamingly so memory stays O(dim).
///
/// The rank precondition is rank >= 2^m: the expected overlap is then
/// rank/2^n >= 2^{m-n}, twice the certified threshold, which is all the
/// concentration argument needs.
inline SimpleStateWitness find_simple_state(const Projector& p,
                                            const ElSearchConfig& config) {
  config.validate();
  if (p.dim() != (std::int64_t{1} << config.n)) {
    throw ArgumentError("find_simple_state: projector dimension != 2^n");
  }
  if (static_cast<std::int64_t>(p.rank()) < (std::int64_t{1} << config.m)) {
    throw ArgumentError("find_simple_state: rank below 2^m");
  }
  const std::int64_t budget = sample_budget(config);
  const double threshold = config.threshold();
  const int precision = config.effective_precision();

  // Pass 1: locate the hit (or the best sample) by stream order.
  detail::SampleStream stream(config.n, precision, config.seed);
  std::optional<ElementaryState> chosen;
  std::int64_t chosen_index = -1;
  double chosen_overlap = 0.0;
  double best_overlap = -1.0;
  for (std::int64_t i = 0; i < budget; ++i) {
    ElementaryState sample = stream.next(i);
    const double ov = overlap(sample.normalized(), p);
    if (ov > best_overlap) {
      best_overlap = ov;
      if (config.best_of_n) {
        chosen = std::move(sample);
        chosen_index = i;
        chosen_overlap = ov;
      }
    }
    if (!config.best_of_n && ov >= threshold) {
      chosen = std::move(sample);
      chosen_index = i;
      chosen_overlap = ov;
      break;
    }
  }
  if (config.best_of_n && chosen_overlap < threshold) chosen.reset();

  // Pass 2: fold the complexity minimization over the full sample codebook.
  const auto fold_h_bound = [&](const PureState& phi) {
    detail::MinTracker tracker;
    detail::SampleStream rescan(config.n, precision, config.seed);
    for (std::int64_t i = 0; i < budget; ++i) {
      ElementaryState sample = rescan.next(i);
      tracker.offer(sample, phi.fidelity(sample.normalized()));
    }
    return tracker.finish();
  };

  if (!chosen) {
    MissReport report;
    report.best_overlap = best_overlap;
    report.threshold = threshold;
    report.samples_used = budget;
    if (best_overlap > 1e-12) {
      // Identify the best sample again and report its image complexity.
      detail::SampleStream rescan(config.n, precision, config.seed);
      for (std::int64_t i = 0; i < budget; ++i) {
        ElementaryState sample = rescan.next(i);
        if (overlap(sample.normalized(), p) == best_overlap) {
          const PureState phi = project_into_image(p, sample.normalized());
          report.best_sampled = std::move(sample);
          report.h_hat_bound = fold_h_bound(phi);
          break;
        }
      }
    }
    throw ThresholdMissError(
        "find_simple_state: no sample reached threshold " +
            std::to_string(threshold) + " after " + std::to_string(budget) +
            " draws (best overlap " + std::to_string(best_overlap) + ")",
        std::move(report));
  }

  const PureState psi = chosen->normalized();
  PureState phi = project_into_image(p, psi);
  detail::check_image_invariant(p, phi);
  if (std::abs(psi.fidelity(phi) - chosen_overlap) > 1e-9) {
    throw Error("find_simple_state: overlap/fidelity mismatch");
  }

  ComplexityEstimate h_bound = fold_h_bound(phi);
  // First-hit mode stops drawing at the hit; best-of-n consumes the budget.
  const std::int64_t samples_used =
      config.best_of_n ? budget : chosen_index + 1;
  SimpleStateWitness witness{std::move(*chosen),
                             std::move(phi),
                             chosen_overlap,
                             samples_used,
                             std::move(h_bound),
                             std::log2(static_cast<double>(budget)),
                             0.0};
  return witness;
}

// ---------------------------------------------------------------------------
// Computable projections: generators emitting P_i with max-norm error 2^{-i}.
// ---------------------------------------------------------------------------

/// A program that computes a projection: generate(i) must emit a rank-`rank`
/// projector P_i with ||P - P_i|| <= 2^{-i} in max norm, hence the Cauchy
/// bound ||P_i - P_j|| <= 2^{-i} + 2^{-j} between emitted pairs. The
/// verifier in approximate_projector enforces what is checkable.
class ApproxProjectorProgram {
 public:
  ApproxProjectorProgram(std::function<Matrix(int)> generator, int rank)
      : generator_(std::move(generator)), rank_(rank) {
    if (rank < 1) throw ArgumentError("ApproxProjectorProgram: rank >= 1");
  }

  int rank() const { return rank_; }
  Matrix generate(int i) const { return generator_(i); }

  const std::optional<std::pair<int, Matrix>>& last_emitted() const {
    return last_;
  }
  void record_emission(int i, const Matrix& m) { last_ = {i, m}; }

 private:
  std::function<Matrix(int)> generator_;
  int rank_;
  std::optional<std::pair<int, Matrix>> last_;
};

/// Runs the generator at index i and verifies its contract: the output must
/// be a rank-exact projector and consecutive emissions must satisfy the
/// Cauchy bound under the max norm.
inline Projector approximate_projector(ApproxProjectorProgram& prog, int i) {
  if (i < 1) throw ArgumentError("approximate_projector: need i >= 1");
  Matrix m = prog.generate(i);
  std::optional<Projector> p;
  try {
    p.emplace(std::move(m), prog.rank());
  } catch (const ArgumentError& e) {
    throw ContractViolationError(
        std::string("approximate_projector: generator output at index ") +
        std::to_string(i) + " is not a rank-" + std::to_string(prog.rank()) +
        " projector: " + e.what());
  }
  if (prog.last_emitted()) {
    const auto& [j, prev] = *prog.last_emitted();
    const double bound = std::exp2(-i) + std::exp2(-j) + 1e-12;
    if (max_norm(p->matrix() - prev) > bound) {
      throw ContractViolationError(
          "approximate_projector: Cauchy bound violated between indices " +
          std::to_string(j) + " and " + std::to_string(i));
    }
  }
  prog.record_emission(i, p->matrix());
  return *p;
}

/// Index at which the approximation error is safely inside the overlap
/// threshold: the smallest i with 2^{-i} < 2^{m-n-4}.
inline int approximation_index(const ElSearchConfig& config) {
  return config.n - config.m + 5;
}

/// Search inside a computable projection: materializes P_{i*} at the index
/// where 2^{-i*} < 2^{m-n-4} and runs the elementary-projector search on it.
/// Relative to the limit projection the certified overlap carries a slack
/// term of 2^{m-n-2}.
inline SimpleStateWitness find_simple_state_computable(
    ApproxProjectorProgram& prog, const ElSearchConfig& config) {
  config.validate();
  const int i_star = approximation_index(config);
  Projector p = approximate_projector(prog, i_star);
  SimpleStateWitness witness = find_simple_state(p, config);
  witness.approx_slack = std::exp2(config.m - config.n - 2);
  return witness;
}

}  // namespace qel
