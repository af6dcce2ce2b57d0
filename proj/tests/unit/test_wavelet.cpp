#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "specmix/random.hpp"
#include "specmix/wavelet.hpp"

using namespace specmix;

namespace {

WaveletBasisSpec db(int n) { return WaveletBasisSpec{WaveletFamily::DaubechiesExtremalPhase, n}; }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("wavelet") {
  TEST_CASE("zero maps to zero") {
    const Vector z = Vector::Zero(64);
    CHECK(dwt(z).cwiseAbs().maxCoeff() == 0.0);
    CHECK(idwt(z).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("energy scales by 1/sqrt(T)") {
    Rng rng(21);
    for (Index T : {16, 64, 512, 1024}) {
      const Vector v = oracle::random_vector(T, rng);
      CHECK(std::abs(dwt(v).norm() * std::sqrt(static_cast<double>(T)) - v.norm()) <= 1e-10 * v.norm());
    }
  }

  TEST_CASE("round trip for every filter length") {
    Rng rng(22);
    for (Index T : {16, 64, 512, 1024}) {
      for (int N = 1; N <= kMaxVanishingMoments; ++N) {
        if (T < 2 * N) continue;
        const Vector v = oracle::random_vector(T, rng);
        CHECK((idwt(dwt(v, db(N)), db(N)) - v).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((dwt(idwt(v, db(N)), db(N)) - v).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }

  TEST_CASE("linearity") {
    Rng rng(23);
    const Vector u = oracle::random_vector(256, rng);
    const Vector v = oracle::random_vector(256, rng);
    const double a = 1.7, b = -0.3;
    CHECK((dwt(a * u + b * v) - a * dwt(u) - b * dwt(v)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("T = 16 matches a dense transform matrix") {
    const Index T = 16;
    for (int N : {1, 2, 6, 8}) {
      const Matrix W = oracle::wavelet_matrix(T, N);
      CHECK((W * W.transpose() - Matrix::Identity(T, T)).cwiseAbs().maxCoeff() <= 1e-12);
      Matrix fast(T, T);
      for (Index j = 0; j < T; ++j) fast.col(j) = dwt(Vector::Unit(T, j), db(N));
      CHECK((fast - W / std::sqrt(static_cast<double>(T))).cwiseAbs().maxCoeff() <= 1e-10);
      Matrix inverse(T, T);
      for (Index j = 0; j < T; ++j) inverse.col(j) = idwt(Vector::Unit(T, j), db(N));
      CHECK((inverse - std::sqrt(static_cast<double>(T)) * W.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("wavelet rows of the dense matrix have zero mean") {
    const Matrix W = oracle::wavelet_matrix(32, 6);
    for (Index k = 1; k < 32; ++k) CHECK(std::abs(W.row(k).sum()) <= 1e-12);
    CHECK(W.row(0).cwiseAbs().minCoeff() == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-12));
  }

  TEST_CASE("constants live in the scaling coefficient") {
    const double c = 2.5;
    for (int N : {1, 4, 6}) {
      const Vector d = dwt(Vector::Constant(16, c), db(N));
      CHECK(d[0] == doctest::Approx(c).epsilon(1e-12));
      CHECK(d.tail(15).cwiseAbs().maxCoeff() <= 1e-12);
      const Vector back = idwt(c * Vector::Unit(16, 0), db(N));
      CHECK((back.array() - c).abs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("polynomial trends up to degree N-1 vanish from the interior details") {
    // Periodization breaks polynomials only where filters wrap around.
    const Index T = 256;
    const int N = 3;
    Vector v(T);
    for (Index t = 0; t < T; ++t) v[t] = 1.0 + 0.5 * t - 0.01 * t * t;
    const Vector d = dwt(v, db(N));
    const auto h = scaling_filter(N);
    const Index L = static_cast<Index>(h.size());
    const Index half = T / 2;
    for (Index m = 0; 2 * m + L <= T; ++m) CHECK(std::abs(d[half + m]) <= 1e-9 * v.cwiseAbs().maxCoeff());
  }

  TEST_CASE("scale of index") {
    CHECK(scale_of_index(1, 64) == -1);
    CHECK(scale_of_index(2, 64) == 0);
    CHECK(scale_of_index(3, 64) == 1);
    CHECK(scale_of_index(4, 64) == 1);
    CHECK(scale_of_index(9, 64) == 3);
    CHECK(scale_of_index(64, 64) == 5);
    for (Index T : {16, 512}) {
      std::vector<int> count(20, 0);
      for (Index k = 2; k <= T; ++k) ++count[static_cast<std::size_t>(scale_of_index(k, T))];
      for (int j = 0; (Index{1} << j) < T; ++j) CHECK(count[static_cast<std::size_t>(j)] == (1 << j));
    }
    CHECK(kind_of([] { (void)scale_of_index(0, 8); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([] { (void)scale_of_index(9, 8); }) == ErrorKind::IndexOutOfRange);
  }

  TEST_CASE("coarsest Haar detail is a half-period square wave") {
    const Index T = 64;
    const Vector v = idwt(Vector::Unit(T, 1), db(1));
    CHECK((v.head(T / 2).array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((v.tail(T / 2).array() + 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(scale_of_index(2, T) == 0);
  }

  TEST_CASE("sparsify") {
    Vector h(5);
    h << 0.5, -0.001, 0.0, 0.2, -0.3;
    const auto same = sparsify(h, 0.0);
    CHECK(same.values == h);
    CHECK(same.support.size() == 5);
    const auto none = sparsify(h, std::numeric_limits<double>::infinity());
    CHECK(none.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(none.support.empty());
    const auto cut = sparsify(h, 1.0 / 64.0);
    CHECK(cut.values[1] == 0.0);
    CHECK(cut.support.indices() == std::vector<Index>{0, 3, 4});
    CHECK(kind_of([&] { (void)sparsify(h, -1.0); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("length errors") {
    CHECK(kind_of([] { (void)dwt(Vector::Zero(48)); }) == ErrorKind::NonDyadicLength);
    CHECK(kind_of([] { (void)idwt(Vector::Zero(48)); }) == ErrorKind::NonDyadicLength);
    CHECK(kind_of([] { (void)dwt(Vector::Zero(8), db(6)); }) == ErrorKind::LengthBelowFilterSupport);
    CHECK(kind_of([] { (void)dwt(Vector::Zero(16), db(0)); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("filters") {
    const auto haar = scaling_filter(1);
    REQUIRE(haar.size() == 2);
    CHECK(haar[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(haar[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    const auto d4 = scaling_filter(2);
    const double s3 = std::sqrt(3.0), den = 4.0 * std::sqrt(2.0);
    const double expected[] = {(1 + s3) / den, (3 + s3) / den, (3 - s3) / den, (1 - s3) / den};
    for (std::size_t i = 0; i < 4; ++i) CHECK(d4[i] == doctest::Approx(expected[i]).epsilon(1e-15));

    CHECK(filter_orthonormality_error() <= 1e-12);
    for (int N = 1; N <= kMaxVanishingMoments; ++N) {
      const auto h = scaling_filter(N);
      CHECK(h.size() == static_cast<std::size_t>(2 * N));
      double sum = 0.0, energy = 0.0;
      for (double c : h) sum += c, energy += c * c;
      CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
      CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
      for (int p = 0; p < N; ++p) {
        double moment = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
          const double g = (i % 2 == 0 ? 1.0 : -1.0) * h[h.size() - 1 - i];
          const double term = g * std::pow(static_cast<double>(i), p);
          moment += term;
          scale += std::abs(term);
        }
        CHECK(std::abs(moment) <= 1e-10 * scale);
      }
    }
  }

  TEST_CASE("row transforms agree with vector transforms") {
    Rng rng(24);
    Matrix X(4, 128);
    for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
    const Matrix D = dwt_rows(X);
    for (Index s = 0; s < 4; ++s) CHECK((D.row(s).transpose() - dwt(X.row(s).transpose())).norm() == 0.0);
    CHECK((idwt_rows(D) - X).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
