#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "specmix/correlation.hpp"
#include "specmix/random.hpp"

using namespace specmix;

namespace {

double min_eig(const Matrix& M) { return Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues().minCoeff(); }

Matrix to_correlation(const Matrix& C) {
  const Vector d = C.diagonal().cwiseSqrt().cwiseInverse();
  Matrix R = d.asDiagonal() * C * d.asDiagonal();
  R.diagonal().setOnes();
  return (R + R.transpose()) / 2.0;
}

}  // namespace

TEST_SUITE("correlation") {
  TEST_CASE("construction validates entries") {
    CHECK_NOTHROW(CorrelationMatrix(Matrix::Identity(3, 3)));
    Matrix bad = Matrix::Identity(3, 3);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(CorrelationMatrix{bad}, Error);
    Matrix asym = Matrix::Identity(3, 3);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(CorrelationMatrix{asym}, Error);
    CHECK_THROWS_AS(CorrelationMatrix{Matrix::Identity(2, 3)}, Error);
    const CorrelationMatrix I = CorrelationMatrix::identity(5);
    CHECK(I.size() == 5);
    CHECK(I.min_eigenvalue() == doctest::Approx(1.0));
    CHECK(I.psd_certified());
  }

  TEST_CASE("identity and PSD inputs are fixed points") {
    const auto id = nearest_correlation(Matrix::Identity(6, 6));
    CHECK(id.converged);
    CHECK((id.matrix.entries() - Matrix::Identity(6, 6)).norm() <= 1e-12);
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix R = to_correlation(oracle::random_spd(8, rng, 0.2));
      const auto out = nearest_correlation(R);
      CHECK(out.converged);
      CHECK((out.matrix.entries() - R).norm() <= 1e-8);
    }
  }

  TEST_CASE("indefinite 3x3 beats eigenvalue clipping") {
    Matrix M(3, 3);
    M << 1.0, 0.99, -0.99, 0.99, 1.0, 0.99, -0.99, 0.99, 1.0;
    REQUIRE(min_eig(M) < 0.0);
    const auto out = nearest_correlation(M);
    const Matrix& X = out.matrix.entries();
    CHECK(out.matrix.min_eigenvalue() >= -1e-8);
    CHECK(min_eig(X) >= -1e-8);
    CHECK((X.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((X - X.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Matrix clip = eigenvalue_clipping(M);
    CHECK(min_eig(clip) >= -1e-10);
    CHECK((clip.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((X - M).norm() < (clip - M).norm());
  }

  TEST_CASE("random indefinite inputs") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 4 + trial % 9;
      const Matrix M = oracle::random_symmetric_unit_diagonal(n, rng);
      const auto out = nearest_correlation(M);
      const Matrix& X = out.matrix.entries();
      CHECK(min_eig(X) >= -1e-8);
      CHECK((X.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK((X - X.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(out.iterations <= 200);
      CHECK((X - M).norm() <= (eigenvalue_clipping(M) - M).norm() + 1e-8);
    }
  }

  TEST_CASE("PSD projection") {
    Matrix M(2, 2);
    M << 1.0, 2.0, 2.0, 1.0;
    const Matrix P = project_psd(M);
    // Eigenvalues 3 and -1; keeping 3 along (1,1)/sqrt(2).
    CHECK(P(0, 0) == doctest::Approx(1.5));
    CHECK(P(0, 1) == doctest::Approx(1.5));
    CHECK(min_eig(P) >= -1e-12);
  }
}
