#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "specmix/wavelet.hpp"

namespace oracle {

Vector naive_periodogram(const std::vector<double>& x) {
  const auto N = static_cast<Index>(x.size());
  Vector out(N / 2 + 1);
  for (Index l = 0; l <= N / 2; ++l) {
    std::complex<double> acc = 0.0;
    for (Index t = 0; t < N; ++t)
      acc += x[static_cast<std::size_t>(t)] *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(l * t) / static_cast<double>(N));
    out[l] = std::norm(acc) / static_cast<double>(N);
  }
  return out;
}

Matrix wavelet_matrix(Index T, int vanishing_moments) {
  const auto h = specmix::scaling_filter(vanishing_moments);
  const auto L = static_cast<Index>(h.size());
  Matrix W = Matrix::Identity(T, T);
  for (Index n = T; n >= 2; n /= 2) {
    Matrix level = Matrix::Identity(T, T);
    level.topLeftCorner(n, n).setZero();
    for (Index m = 0; m < n / 2; ++m) {
      for (Index i = 0; i < L; ++i) {
        const double g = h[static_cast<std::size_t>(i)];
        const double hp = (i % 2 == 0 ? 1.0 : -1.0) * h[static_cast<std::size_t>(L - 1 - i)];
        level(m, (2 * m + i) % n) += g;
        level(n / 2 + m, (2 * m + i) % n) += hp;
      }
    }
    W = level * W;
  }
  return W;
}

Matrix random_spd(Index n, specmix::Rng& rng, double ridge) {
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = rng.normal();
  Matrix out = A * A.transpose() / static_cast<double>(n);
  out.diagonal().array() += ridge;
  return out;
}

Matrix random_symmetric_unit_diagonal(Index n, specmix::Rng& rng) {
  Matrix M = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) M(i, j) = M(j, i) = 2.0 * rng.uniform() - 1.0;
  return M;
}

Vector random_vector(Index n, specmix::Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

std::vector<Index> brute_force_fdr(const Vector& z, double noise_sd, double q) {
  const Index T = z.size();
  std::vector<Index> best;
  for (Index c = 0; c < T; ++c) {
    const double cut = std::abs(z[c]);
    std::vector<Index> set;
    double worst_p = 0.0;
    for (Index k = 0; k < T; ++k) {
      if (std::abs(z[k]) >= cut) {
        set.push_back(k);
        worst_p = std::max(worst_p, std::erfc(std::abs(z[k]) / noise_sd / std::numbers::sqrt2));
      }
    }
    const double bound = q * static_cast<double>(set.size()) / static_cast<double>(T);
    if (worst_p <= bound && set.size() > best.size()) best = set;
  }
  return best;
}

std::vector<double> arma_autocovariance(const std::vector<double>& ar, const std::vector<double>& ma, double sigma2,
                                        int max_lag) {
  const int n = 20000;
  std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double v = j == 0 ? 1.0 : (j <= static_cast<int>(ma.size()) ? ma[static_cast<std::size_t>(j - 1)] : 0.0);
    for (int p = 1; p <= static_cast<int>(ar.size()) && p <= j; ++p)
      v += ar[static_cast<std::size_t>(p - 1)] * psi[static_cast<std::size_t>(j - p)];
    psi[static_cast<std::size_t>(j)] = v;
  }
  std::vector<double> gamma(static_cast<std::size_t>(max_lag + 1), 0.0);
  for (int h = 0; h <= max_lag; ++h)
    for (int j = 0; j + h < n; ++j)
      gamma[static_cast<std::size_t>(h)] += psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j + h)];
  for (double& g : gamma) g *= sigma2;
  return gamma;
}

double Moments::se() const { return std::sqrt(variance / static_cast<double>(n)); }

Moments moments(const std::vector<double>& x) {
  Moments m;
  m.n = x.size();
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace oracle
