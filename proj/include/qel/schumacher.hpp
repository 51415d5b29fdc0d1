#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qel/elfinder.hpp"
#include "qel/errors.hpp"
#include "qel/qcore.hpp"

namespace qel {

/// Finite ensemble of pure states with probabilities. The states need not
/// be orthogonal.
class QuantumSource {
 public:
  QuantumSource(std::vector<PureState> states, std::vector<double> probs)
      : states_(std::move(states)), probs_(std::move(probs)) {
    if (states_.empty() || states_.size() != probs_.size()) {
      throw ArgumentError("QuantumSource: states/probs size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] <= 0.0) throw ArgumentError("QuantumSource: p <= 0");
      if (states_[i].dim() != states_[0].dim()) {
        throw ArgumentError("QuantumSource: mixed dimensions");
      }
      sum += probs_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ArgumentError("QuantumSource: probabilities sum to " +
                          std::to_string(sum));
    }
  }

  const std::vector<PureState>& states() const { return states_; }
  const std::vector<double>& probs() const { return probs_; }
  std::int64_t dim() const { return states_[0].dim(); }
  int qubits_per_symbol() const { return states_[0].n_qubits(); }

 private:
  std::vector<PureState> states_;
  std::vector<double> probs_;
};

/// rho = sum_i p_i |psi_i><psi_i|.
inline DensityMatrix density_matrix(const QuantumSource& source) {
  Matrix rho = Matrix::Zero(source.dim(), source.dim());
  for (std::size_t i = 0; i < source.states().size(); ++i) {
    const Vector& v = source.states()[i].amplitudes();
    rho += source.probs()[i] * (v * v.adjoint());
  }
  rho = ((rho + rho.adjoint()) * 0.5).eval();
  return DensityMatrix(std::move(rho));
}

namespace detail {

inline double entropy_from_eigenvalues(const Eigen::VectorXd& values) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double lambda = values(i);
    if (lambda > 1e-15) s -= lambda * std::log2(lambda);
  }
  return s < 0.0 ? 0.0 : s;
}

}  // namespace detail

/// S(rho) = -sum lambda log2 lambda, in bits, with 0 log 0 = 0.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  const EigenSystem sys = eigen_hermitian(rho.matrix());
  const double s = detail::entropy_from_eigenvalues(sys.values);
  const double cap = std::log2(static_cast<double>(rho.dim()));
  return s > cap ? cap : s;
}

/// Typical subspace of the k-fold source: the span of eigenvectors of
/// rho^(tensor k) whose eigenvalue lambda satisfies
/// |-(1/k) log2 lambda - S(rho)| <= epsilon.
struct TypicalSubspace {
  int block_length = 0;
  Projector projector;
  double rate = 0.0;  // log2(rank) / k, bits per symbol
  double epsilon = 0.0;
};

/// Builds the typical projector by enumerating product eigenpairs of the
/// per-symbol density matrix; the k-fold matrix itself is never formed.
/// The selected rank always satisfies rank <= 2^{k(S+epsilon)}.
inline TypicalSubspace typical_projector(const DensityMatrix& rho, int k,
                                         double epsilon) {
  if (k < 1) throw ArgumentError("typical_projector: k >= 1");
  if (epsilon <= 0.0) throw ArgumentError("typical_projector: epsilon > 0");
  const std::int64_t base = rho.dim();
  std::int64_t dim = 1;
  for (int i = 0; i < k; ++i) {
    if (dim > max_dim() / base) {
      throw ResourceError("typical_projector: dim^k exceeds limit " +
                          std::to_string(max_dim()));
    }
    dim *= base;
  }
  const EigenSystem sys = eigen_hermitian(rho.matrix());
  const double entropy = detail::entropy_from_eigenvalues(sys.values);

  std::vector<double> neg_log(base, 0.0);
  std::vector<bool> usable(base, false);
  for (std::int64_t a = 0; a < base; ++a) {
    const double lambda = std::min(sys.values(a), 1.0);
    if (lambda > 1e-15) {
      neg_log[a] = -std::log2(lambda);
      usable[a] = true;
    }
  }

  std::vector<std::int64_t> selected;
  std::vector<std::int64_t> digits(k);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    std::int64_t rem = idx;
    double nll = 0.0;
    bool dead = false;
    for (int j = k - 1; j >= 0; --j) {
      digits[j] = rem % base;
      rem /= base;
      if (!usable[digits[j]]) {
        dead = true;
        break;
      }
      nll += neg_log[digits[j]];
    }
    if (dead) continue;
    if (std::abs(nll / k - entropy) <= epsilon) selected.push_back(idx);
  }
  if (selected.empty()) {
    throw ArgumentError("typical_projector: typicality window is empty");
  }
  const double rank_cap = std::exp2(k * (entropy + epsilon));
  if (static_cast<double>(selected.size()) > rank_cap * (1.0 + 1e-9)) {
    throw Error("typical_projector: rank bound violated");
  }

  Matrix v(dim, static_cast<Eigen::Index>(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    std::int64_t rem = selected[c];
    for (int j = k - 1; j >= 0; --j) {
      digits[j] = rem % base;
      rem /= base;
    }
    Vector col = Vector::Ones(1);
    for (int j = 0; j < k; ++j) {
      const Vector& factor = sys.vectors.col(digits[j]);
      Vector next(col.size() * base);
      for (Eigen::Index r = 0; r < col.size(); ++r) {
        next.segment(r * base, base) = col(r) * factor;
      }
      col = std::move(next);
    }
    v.col(static_cast<Eigen::Index>(c)) = col;
  }

  TypicalSubspace out{k, Projector::from_orthonormal_columns(v),
                      std::log2(static_cast<double>(selected.size())) / k,
                      epsilon};
  return out;
}

namespace detail {

/// Eigenvalue classes of rho^(tensor k): a value and how many product
/// eigenvectors share it. Binomial path for two per-symbol eigenvalues
/// (any k up to 64), explicit product enumeration otherwise.
struct SpectrumClass {
  long double value;
  unsigned __int128 count;
};

inline std::vector<SpectrumClass> tensor_spectrum_classes(
    const Eigen::VectorXd& values, int k) {
  const std::int64_t base = values.size();
  std::vector<SpectrumClass> classes;
  if (base == 2) {
    if (k > 64) throw ResourceError("spectrum classes: k > 64");
    const long double l0 = std::max(0.0, values(0));
    const long double l1 = std::max(0.0, values(1));
    // Pascal row for C(k, w); fits unsigned 64-bit through k = 64.
    std::vector<std::uint64_t> choose(static_cast<std::size_t>(k) + 1, 0);
    choose[0] = 1;
    for (int row = 1; row <= k; ++row) {
      for (int w = row; w >= 1; --w) choose[w] += choose[w - 1];
    }
    for (int w = 0; w <= k; ++w) {
      const long double value = std::pow(l0, static_cast<long double>(k - w)) *
                                std::pow(l1, static_cast<long double>(w));
      classes.push_back({value, choose[w]});
    }
  } else {
    if (k * std::log2(static_cast<double>(base)) > 24.0) {
      throw ResourceError("spectrum classes: base^k too large");
    }
    std::int64_t dim = 1;
    for (int i = 0; i < k; ++i) dim *= base;
    for (std::int64_t idx = 0; idx < dim; ++idx) {
      std::int64_t rem = idx;
      long double value = 1.0L;
      for (int j = 0; j < k; ++j) {
        value *= std::max(0.0, values(rem % base));
        rem /= base;
      }
      classes.push_back({value, 1});
    }
  }
  std::sort(classes.begin(), classes.end(),
            [](const SpectrumClass& a, const SpectrumClass& b) {
              return a.value > b.value;
            });
  return classes;
}

}  // namespace detail

/// Ensemble-average fidelity of the rank-floor(2^{k rate}) measure-and-keep
/// scheme: the retained projector spans the top eigenvectors of
/// rho^(tensor k), and averaging <block|T|block> over product-state blocks
/// equals exactly the eigenvalue mass the projector captures.
inline double compression_fidelity(const QuantumSource& source, int k,
                                   double rate) {
  if (k < 1) throw ArgumentError("compression_fidelity: k >= 1");
  const double per_symbol = static_cast<double>(source.qubits_per_symbol());
  if (rate < 0.0 || rate > per_symbol + 1e-12) {
    throw ArgumentError("compression_fidelity: rate outside [0, " +
                        std::to_string(per_symbol) + "]");
  }
  const DensityMatrix rho = density_matrix(source);
  const EigenSystem sys = eigen_hermitian(rho.matrix());

  // Rank kept: floor(2^{k rate}), capped at the full block dimension.
  unsigned __int128 total = 1;
  bool saturated = false;
  for (int i = 0; i < k; ++i) {
    if (total > (static_cast<unsigned __int128>(1) << 120) / rho.dim()) {
      saturated = true;
      break;
    }
    total *= static_cast<unsigned __int128>(rho.dim());
  }
  const long double exponent = static_cast<long double>(k) * rate;
  unsigned __int128 keep;
  if (exponent >= 120.0L) {
    keep = total;
    saturated = true;
  } else {
    const long double raw = std::floor(std::exp2(exponent));
    keep = static_cast<unsigned __int128>(raw);
    if (!saturated && keep > total) keep = total;
  }
  if (keep < 1) keep = 1;

  long double mass = 0.0L;
  unsigned __int128 taken = 0;
  for (const auto& cls :
       detail::tensor_spectrum_classes(sys.values, k)) {
    if (taken >= keep) break;
    const unsigned __int128 take =
        std::min<unsigned __int128>(cls.count, keep - taken);
    mass += cls.value * static_cast<long double>(take);
    taken += take;
  }
  const double fidelity = static_cast<double>(mass);
  return fidelity > 1.0 ? 1.0 : fidelity;
}

// ---------------------------------------------------------------------------
// Claim experiment: entropy vs. the complexity of states found inside the
// coding projector.
// ---------------------------------------------------------------------------

enum class SourceFamily { diag, tilted };

inline SourceFamily parse_source_family(const std::string& name) {
  if (name == "diag") return SourceFamily::diag;
  if (name == "tilted") return SourceFamily::tilted;
  throw ArgumentError("unknown source family '" + name +
                      "' (expected diag or tilted)");
}

/// diag:   |0> w.p. p, |1> w.p. 1-p           (classical, rho diagonal)
/// tilted: |0> w.p. p, |+> w.p. 1-p           (non-orthogonal states)
inline QuantumSource make_source(SourceFamily family, double p) {
  if (p <= 0.0 || p >= 1.0) {
    // p = 1 would leave a zero-probability entry; model pure sources with a
    // single state instead.
    if (p == 1.0) {
      return QuantumSource({PureState::basis(1, 0)}, {1.0});
    }
    throw ArgumentError("make_source: p must be in (0, 1]");
  }
  std::vector<PureState> states;
  states.push_back(PureState::basis(1, 0));
  if (family == SourceFamily::diag) {
    states.push_back(PureState::basis(1, 1));
  } else {
    Vector plus(2);
    plus << Complex(1.0 / std::numbers::sqrt2, 0.0),
        Complex(1.0 / std::numbers::sqrt2, 0.0);
    states.push_back(PureState(1, std::move(plus)));
  }
  return QuantumSource(std::move(states), {p, 1.0 - p});
}

/// Rank exponent used to drive the finder for a given projector rank:
/// floor(log2 rank), capped so that m < n.
inline int rank_exponent(int rank, int n) {
  return std::min(n - 1, floor_log2(rank));
}

struct ClaimConfig {
  SourceFamily family = SourceFamily::diag;
  std::vector<double> p_values;
  int k = 8;
  double epsilon = 0.35;
  int d = 5;
  int n_seeds = 20;
  std::uint64_t master_seed = 1;
  int precision_bits = 0;  // 0 = finder default
};

struct ClaimRow {
  double p = 0.0;
  double entropy_bits = 0.0;
  int k = 0;
  int n = 0;
  int m = 0;
  int rank = 0;
  double epsilon = 0.0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  std::int64_t budget = 0;
  bool hit = false;
  double overlap = 0.0;
  double threshold = 0.0;
  double k_hat_sampled = 0.0;
  double h_hat_bound = 0.0;
  int reference_3nm = 0;
  std::int64_t samples_used = 0;
};

/// Full pipeline sweep: for each source parameter, build the typical
/// projector, derive m from its rank, and run the simple-state search for
/// each seed. Rows come out in parameter-grid order (p outer, seed inner);
/// per-row seeds are master_seed + seed_index * 2^32, so sample streams
/// never overlap between rows.
inline std::vector<ClaimRow> claim_experiment(const ClaimConfig& config) {
  if (config.p_values.empty()) {
    throw ArgumentError("claim_experiment: empty parameter grid");
  }
  if (config.n_seeds < 1) throw ArgumentError("claim_experiment: n_seeds >= 1");
  std::vector<ClaimRow> rows;
  for (const double p : config.p_values) {
    const QuantumSource source = make_source(config.family, p);
    const DensityMatrix rho = density_matrix(source);
    const double entropy = von_neumann_entropy(rho);
    const TypicalSubspace typical =
        typical_projector(rho, config.k, config.epsilon);
    const int n = config.k * source.qubits_per_symbol();
    const int m = rank_exponent(typical.projector.rank(), n);

    for (int s = 0; s < config.n_seeds; ++s) {
      ElSearchConfig search;
      search.n = n;
      search.m = m;
      search.d = config.d;
      search.precision_bits = config.precision_bits;
      search.seed = config.master_seed +
                    (static_cast<std::uint64_t>(s) << 32);

      ClaimRow row;
      row.p = p;
      row.entropy_bits = entropy;
      row.k = config.k;
      row.n = n;
      row.m = m;
      row.rank = typical.projector.rank();
      row.epsilon = config.epsilon;
      row.seed_index = s;
      row.seed = search.seed;
      row.budget = sample_budget(search);
      row.threshold = search.threshold();
      row.reference_3nm = 3 * (n - m);
      try {
        const SimpleStateWitness witness =
            find_simple_state(typical.projector, search);
        row.hit = true;
        row.overlap = witness.overlap;
        row.k_hat_sampled = static_cast<double>(witness.sampled.k_hat());
        row.h_hat_bound = witness.h_hat_bound.value;
        row.samples_used = witness.samples_used;
      } catch (const ThresholdMissError& miss) {
        row.hit = false;
        row.overlap = miss.report().best_overlap;
        row.samples_used = miss.report().samples_used;
        if (miss.report().best_sampled) {
          row.k_hat_sampled =
              static_cast<double>(miss.report().best_sampled->k_hat());
        }
        if (miss.report().h_hat_bound) {
          row.h_hat_bound = miss.report().h_hat_bound->value;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace qel
