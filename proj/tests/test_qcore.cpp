#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qel/qcore.hpp"
#include "test_util.hpp"

using namespace qel;

TEST_CASE("haar samples are unit vectors and deterministic") {
  Rng rng(42);
  for (int n : {1, 3, 6}) {
    const PureState psi = haar_sample(n, rng);
    REQUIRE(psi.dim() == (std::int64_t{1} << n));
    REQUIRE(std::abs(psi.amplitudes().norm() - 1.0) < 1e-12);
  }

  Rng a(7), b(7);
  REQUIRE(haar_sample(4, a).amplitudes() == haar_sample(4, b).amplitudes());
}

TEST_CASE("haar single-qubit moment matches rank/dim") {
  // E |<0|psi>|^2 = 1/2 for Haar on one qubit.
  Rng rng(123);
  const int samples = 100000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    sum += std::norm(haar_sample(1, rng).amplitudes()(0));
  }
  REQUIRE(std::abs(sum / samples - 0.5) < 0.01);
}

TEST_CASE("haar sampling respects the dimension limit") {
  Rng rng(1);
  REQUIRE_THROWS_AS(haar_sample(0, rng), ArgumentError);
  test::ScopedMaxDim cap(8);
  REQUIRE_THROWS_AS(haar_sample(4, rng), ResourceError);
}

TEST_CASE("overlap handles the documented cases") {
  Rng rng(5);
  const PureState psi = haar_sample(3, rng);
  REQUIRE(overlap(psi, Projector::identity(8)) == Catch::Approx(1.0));

  Vector plus(2);
  plus << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  const PureState plus_state(1, plus);
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  REQUIRE(overlap(plus_state, Projector(p0, 1)) == Catch::Approx(0.5));

  Matrix p00 = Matrix::Zero(4, 4);
  p00(0, 0) = 1.0;
  REQUIRE(overlap(PureState::basis(2, 3), Projector(p00, 1)) == 0.0);

  REQUIRE_THROWS_AS(overlap(plus_state, Projector::identity(4)),
                    ArgumentError);
}

TEST_CASE("project_into_image basics") {
  Vector plus(2);
  plus << Complex(1 / std::sqrt(2.0), 0), Complex(1 / std::sqrt(2.0), 0);
  const PureState plus_state(1, plus);

  SECTION("identity projector returns the input") {
    const PureState phi = project_into_image(Projector::identity(2), plus_state);
    REQUIRE((phi.amplitudes() - plus_state.amplitudes()).norm() < 1e-12);
  }

  SECTION("|0><0| sends |+> to |0> with fidelity 1/2") {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    const PureState phi = project_into_image(Projector(p0, 1), plus_state);
    REQUIRE(std::abs(phi.amplitudes()(0) - Complex(1, 0)) < 1e-12);
    REQUIRE(plus_state.fidelity(phi) == Catch::Approx(0.5));
  }

  SECTION("orthogonal input is a degenerate projection") {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    REQUIRE_THROWS_AS(project_into_image(Projector(p0, 1), PureState::basis(1, 1)),
                      DegenerateProjectionError);
  }

  SECTION("fidelity to the image equals the overlap") {
    Rng rng(99);
    const Projector p = random_elementary_projector(4, 4, 12, rng);
    for (int i = 0; i < 20; ++i) {
      const PureState psi = haar_sample(4, rng);
      const PureState phi = project_into_image(p, psi);
      // Independent route: raw matrix arithmetic, no overlap() call.
      const Vector image = p.matrix() * psi.amplitudes();
      const double expected = image.squaredNorm();
      REQUIRE(std::abs(psi.fidelity(phi) - expected) < 1e-9);
      REQUIRE(std::abs(overlap(psi, p) - expected) < 1e-10);
    }
  }
}

TEST_CASE("project_into_image output lies in the image with unit norm") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 3));
    const std::int64_t dim = std::int64_t{1} << n;
    const int rank = 1 + static_cast<int>(rng.uniform_int(0, dim - 1));
    const Projector p = random_elementary_projector(n, rank, 10, rng);
    const PureState psi = haar_sample(n, rng);
    const PureState phi = project_into_image(p, psi);
    REQUIRE((p.matrix() * phi.amplitudes() - phi.amplitudes())
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    REQUIRE(std::abs(phi.amplitudes().norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("random elementary projectors satisfy the spectral contract") {
  Rng rng(31337);

  SECTION("full rank gives the identity") {
    const Projector p = random_elementary_projector(2, 4, 10, rng);
    REQUIRE(max_norm(p.matrix() - Matrix::Identity(4, 4)) < 1e-9);
  }

  SECTION("rank one on one qubit has spectrum {1, 0}") {
    const Projector p = random_elementary_projector(1, 1, 10, rng);
    const EigenSystem sys = eigen_hermitian(p.matrix());
    REQUIRE(sys.values(0) == Catch::Approx(1.0).margin(1e-7));
    REQUIRE(sys.values(1) == Catch::Approx(0.0).margin(1e-7));
  }

  SECTION("trace equals rank") {
    const Projector p = random_elementary_projector(3, 4, 12, rng);
    const EigenSystem sys = eigen_hermitian(p.matrix());
    REQUIRE(std::abs(sys.values.sum() - 4.0) < 1e-9);
  }

  SECTION("property sweep: hermitian, idempotent, eigenvalues in {0,1}") {
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
      const std::int64_t dim = std::int64_t{1} << n;
      const int rank = 1 + static_cast<int>(rng.uniform_int(0, dim - 1));
      const int precision = 6 + static_cast<int>(rng.uniform_int(0, 10));
      const Projector p = random_elementary_projector(n, rank, precision, rng);
      REQUIRE(max_norm(p.matrix() - p.matrix().adjoint()) < 1e-9);
      REQUIRE(max_norm(p.matrix() * p.matrix() - p.matrix()) < 1e-9);
      const EigenSystem sys = eigen_hermitian(p.matrix());
      int near_one = 0;
      for (Eigen::Index i = 0; i < sys.values.size(); ++i) {
        const double lambda = sys.values(i);
        const bool is_one = std::abs(lambda - 1.0) < 1e-7;
        const bool is_zero = std::abs(lambda) < 1e-7;
        REQUIRE((is_one || is_zero));
        if (is_one) ++near_one;
      }
      REQUIRE(near_one == rank);
    }
  }

  SECTION("rank out of range is rejected") {
    REQUIRE_THROWS_AS(random_elementary_projector(2, 0, 10, rng),
                      ArgumentError);
    REQUIRE_THROWS_AS(random_elementary_projector(2, 5, 10, rng),
                      ArgumentError);
  }
}

TEST_CASE("haar moment concentrates on rank/dim") {
  Rng rng(777);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 4));
    const std::int64_t dim = std::int64_t{1} << n;
    const int rank = 1 + static_cast<int>(rng.uniform_int(0, dim - 1));
    const Projector p = random_elementary_projector(n, rank, 12, rng);
    const int samples = 4000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double ov = overlap(haar_sample(n, rng), p);
      sum += ov;
      sum_sq += ov * ov;
    }
    const double mean = sum / samples;
    const double var = (sum_sq - sum * mean) / (samples - 1);
    const double se = std::sqrt(std::max(0.0, var) / samples);
    const double expected = static_cast<double>(rank) / dim;
    REQUIRE(std::abs(mean - expected) <= 4.0 * se + 1e-15);
  }
}

TEST_CASE("eigen_hermitian on known spectra") {
  SECTION("diag(1,0)") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    const EigenSystem sys = eigen_hermitian(m);
    REQUIRE(sys.values(0) == Catch::Approx(1.0));
    REQUIRE(sys.values(1) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(std::abs(std::abs(sys.vectors(0, 0)) - 1.0) < 1e-12);
  }

  SECTION("Pauli X") {
    Matrix x(2, 2);
    x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    const EigenSystem sys = eigen_hermitian(x);
    REQUIRE(sys.values(0) == Catch::Approx(1.0));
    REQUIRE(sys.values(1) == Catch::Approx(-1.0));
  }

  SECTION("reconstruction and orthonormality on random input") {
    Rng rng(4);
    const Matrix m = test::random_hermitian(16, rng);
    const EigenSystem sys = eigen_hermitian(m);
    const Matrix rebuilt =
        sys.vectors * sys.values.asDiagonal() * sys.vectors.adjoint();
    REQUIRE(max_norm(rebuilt - m) < 1e-8);
    REQUIRE(max_norm(sys.vectors.adjoint() * sys.vectors -
                     Matrix::Identity(16, 16)) < 1e-9);
    for (Eigen::Index i = 1; i < sys.values.size(); ++i) {
      REQUIRE(sys.values(i - 1) >= sys.values(i));
    }
  }

  SECTION("non-Hermitian input is rejected") {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(1, 0), Complex(2, 0), Complex(0, 0);
    REQUIRE_THROWS_AS(eigen_hermitian(m), ArgumentError);
  }
}

TEST_CASE("max_norm evaluates the largest modulus") {
  REQUIRE(max_norm(Matrix::Zero(3, 3)) == 0.0);
  REQUIRE(max_norm(Matrix::Identity(5, 5)) == 1.0);
  Matrix m(2, 2);
  m << Complex(3, 4), Complex(0, 0), Complex(0, 0), Complex(1, 0);
  REQUIRE(max_norm(m) == Catch::Approx(5.0));

  // Entrywise norm axioms.
  Rng rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = test::random_hermitian(6, rng);
    const Matrix b = test::random_hermitian(6, rng);
    REQUIRE(max_norm(a + b) <= max_norm(a) + max_norm(b) + 1e-12);
    const double c = rng.gaussian();
    REQUIRE(max_norm(c * a) == Catch::Approx(std::abs(c) * max_norm(a)));
  }
}

TEST_CASE("tensor_power") {
  Matrix d10 = Matrix::Zero(2, 2);
  d10(0, 0) = 1.0;
  const DensityMatrix rho(d10);

  SECTION("k = 1 is the input") {
    REQUIRE(max_norm(tensor_power(rho, 1).matrix() - rho.matrix()) == 0.0);
  }

  SECTION("diag(1,0) squared") {
    const DensityMatrix out = tensor_power(rho, 2);
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    REQUIRE(max_norm(out.matrix() - expected) < 1e-12);
  }

  SECTION("maximally mixed cubes to uniform 1/8") {
    const DensityMatrix mixed(Matrix::Identity(2, 2) * 0.5);
    const DensityMatrix out = tensor_power(mixed, 3);
    REQUIRE(max_norm(out.matrix() - Matrix::Identity(8, 8) / 8.0) < 1e-12);
    REQUIRE(std::abs(out.matrix().trace().real() - 1.0) < 1e-8);
  }

  SECTION("resource limit") {
    test::ScopedMaxDim cap(16);
    REQUIRE_THROWS_AS(tensor_power(rho, 5), ResourceError);
  }
}

TEST_CASE("projector and density validation reject bad inputs") {
  Vector not_unit(2);
  not_unit << Complex(1, 0), Complex(1, 0);
  REQUIRE_THROWS_AS(PureState(1, not_unit), ArgumentError);
  REQUIRE_THROWS_AS(PureState(2, Vector::Zero(3)), ArgumentError);
  REQUIRE_THROWS_AS(PureState::basis(1, 2), ArgumentError);

  Matrix not_herm(2, 2);
  not_herm << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  REQUIRE_THROWS_AS(Projector(not_herm, 1), ArgumentError);

  Matrix not_idem = Matrix::Identity(2, 2) * 0.5;
  REQUIRE_THROWS_AS(Projector(not_idem, 1), ArgumentError);

  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  REQUIRE_THROWS_AS(Projector(p0, 2), ArgumentError);  // trace/rank mismatch

  Matrix bad_trace = Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(DensityMatrix(bad_trace), ArgumentError);

  Matrix negative(2, 2);
  negative << Complex(1.5, 0), Complex(0, 0), Complex(0, 0), Complex(-0.5, 0);
  REQUIRE_THROWS_AS(DensityMatrix(negative), ArgumentError);
}

TEST_CASE("rng worker derivation is reproducible") {
  // worker_seed = master_seed + worker_index, applied before sampling
  const std::uint64_t master = 1000;
  Rng w0(master + 0), w0_again(master + 0), w1(master + 1);
  REQUIRE(w0.next_u64() == w0_again.next_u64());
  Rng w0b(master + 0);
  w0b.next_u64();
  REQUIRE(w0b.next_u64() != w1.next_u64());
  REQUIRE(Rng::algorithm() == "mt19937_64+box-muller");
}
