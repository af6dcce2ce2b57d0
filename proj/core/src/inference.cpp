#include "specmix/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "specmix/parallel.hpp"
#include "specmix/random.hpp"
#include "specmix/special_functions.hpp"

namespace specmix {

bool ConfidenceRegion::contains(const Vector& h) const {
  require(h.size() == center.size(), ErrorKind::DimensionMismatch, "candidate does not match the region");
  if (weighted_variance.size() == 0) return ball_contains(h);
  const Vector d = h - center;
  const double tau2 = A + 8.0 * d.cwiseAbs2().dot(weighted_variance);
  return d.squaredNorm() <= z * std::sqrt(tau2) + risk;
}

ConfidenceRegion ConfidenceRegion::in_frequency_domain(const WaveletBasisSpec& basis) const {
  require(domain == RegionDomain::Coefficient, ErrorKind::InvalidArgument, "region is already in the frequency domain");
  ConfidenceRegion out = *this;
  out.center = idwt(center, basis);
  out.radius = std::sqrt(static_cast<double>(center.size())) * radius;
  out.domain = RegionDomain::Frequency;
  out.weighted_variance.resize(0);
  return out;
}

Matrix draw_gaussian_panel(const CovarianceModel& V, std::uint64_t seed) {
  Rng rng(seed);
  Matrix Z(V.replicates(), V.length());
  for (Index k = 0; k < Z.cols(); ++k)
    for (Index s = 0; s < Z.rows(); ++s) Z(s, k) = rng.normal();
  return V.sqrt_apply_columns(Z);
}

SplitPanels split_sample(const CoefficientPanel& Y, const CovarianceModel& V, std::uint64_t seed) {
  require(V.replicates() == Y.replicates() && V.length() == Y.length(), ErrorKind::DimensionMismatch,
          "covariance model does not match the panel");
  require(V.clipped_mass() <= 1e-6, ErrorKind::NonPSDCovariance,
          "covariance is not positive semidefinite (clipped mass " + std::to_string(V.clipped_mass()) + ")");
  const Matrix X = draw_gaussian_panel(V, seed);
  return {CoefficientPanel(Y.values() - X), CoefficientPanel(Y.values() + X)};
}

double risk_estimator(const CoefficientPanel& xi2, const Vector& h_hat, const Matrix& weights,
                      const CovarianceModel& V) {
  const Index T = xi2.length();
  require(h_hat.size() == T && weights.cols() == T && weights.rows() == xi2.replicates(),
          ErrorKind::DimensionMismatch, "risk inputs do not match");
  double total = 0.0;
  for (Index k = 0; k < T; ++k) {
    const Vector w = weights.col(k);
    const double fit = w.dot((xi2.col(k).array() - h_hat[k]).square().matrix());
    // Every diagonal entry of V_k equals sigma_u2[k] + noise since G_S has unit diagonal.
    const double diag_mean = w.dot(V.correlation().diagonal()) * V.sigma_u2()[k] + V.noise_variance() * w.sum();
    total += fit - 2.0 * diag_mean;
  }
  return total;
}

RadiusTerms radius_terms(const Matrix& weights, const CovarianceModel& V) {
  RadiusTerms out;
  out.q = Vector::Zero(weights.cols());
  const Matrix& G = V.correlation();
  const Matrix G2 = G.cwiseAbs2();
  const double n = V.noise_variance();
  for (Index k = 0; k < weights.cols(); ++k) {
    const Vector w = weights.col(k);
    const double s2 = V.sigma_u2()[k];
    // ||diag(w) (s2 G + n I)||_F^2 = sum_i w_i^2 (s2^2 sum_j G_ij^2 + 2 s2 n G_ii + n^2)
    const Vector row = s2 * s2 * G2.rowwise().sum() + (2.0 * s2 * n) * G.diagonal() + Vector::Constant(w.size(), n * n);
    out.A += 8.0 * w.cwiseAbs2().dot(row);
    out.q[k] = s2 * w.dot(G * w) + n * w.squaredNorm();
    out.c = std::max(out.c, out.q[k]);
  }
  return out;
}

double risk_variance(const Vector& h, const Vector& h_hat, const Matrix& weights, const CovarianceModel& V) {
  require(h.size() == h_hat.size() && h.size() == weights.cols(), ErrorKind::DimensionMismatch,
          "risk variance inputs do not match");
  const RadiusTerms base = radius_terms(weights, V);
  const double second = 8.0 * (h - h_hat).cwiseAbs2().dot(base.q);
  return base.A + second;
}

double solve_radius(double z, double A, double c, double R) {
  require(A >= 0.0 && c >= 0.0, ErrorKind::InvalidArgument, "radius terms must be nonnegative");
  const double Rp = std::max(R, 0.0);
  const auto f = [&](double s) { return s - z * std::sqrt(A + 8.0 * c * s) - Rp; };
  if (f(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * Rp);
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi);
}

ConfidenceRegion asymptotic_region(const CoefficientPanel& Y, const CovarianceModel& V, const Matrix& weights,
                                   const ThresholdConfig& cfg, double alpha, std::uint64_t seed) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  const SplitPanels split = split_sample(Y, V, seed);
  ThresholdConfig doubled = cfg;
  doubled.sigma_e2 = 2.0 * cfg.sigma_e2;
  const SelectedSet K_h = select_fixed_set(split.xi1, doubled);
  ConfidenceRegion region;
  region.center = estimate_fixed_effects(split.xi1, weights, K_h);
  region.risk = risk_estimator(split.xi2, region.center, weights, V);
  const RadiusTerms terms = radius_terms(weights, V);
  region.A = terms.A;
  region.c = terms.c;
  region.weighted_variance = terms.q;
  region.z = normal_quantile(1.0 - alpha);
  region.radius = solve_radius(region.z, terms.A, terms.c, region.risk);
  region.level = 1.0 - alpha;
  region.seed = seed;
  return region;
}

ConfidenceRegion confidence_region(const CoefficientPanel& Y, const ModelFit& fit, const ThresholdConfig& cfg,
                                   double alpha, RegionMethod method, std::uint64_t seed,
                                   const CovarianceModel* known) {
  require(fit.length() == Y.length() && fit.replicates() == Y.replicates(), ErrorKind::DimensionMismatch,
          "model does not match the panel");
  ConfidenceRegion region;
  switch (method) {
    case RegionMethod::AsymptoticKnownV: {
      const CovarianceModel V = known ? *known : fit.covariance();
      region = asymptotic_region(Y, V, V.gls_weight_matrix(), cfg, alpha, seed);
      break;
    }
    case RegionMethod::AsymptoticPlugin: {
      const CovarianceModel V = fit.covariance();
      region = asymptotic_region(Y, V, ols_weight_matrix(Y.replicates(), Y.length()), cfg, alpha, seed);
      break;
    }
    case RegionMethod::Bootstrap: {
      const CovarianceModel V = known ? *known : fit.covariance();
      region = bootstrap_region(fit.h_hat, V, fit.weights, cfg, 1000, alpha, seed);
      break;
    }
  }
  region.method = method;
  return region;
}

ConfidenceRegion bootstrap_region(const Vector& center, const CovarianceModel& V, const Matrix& weights,
                                  const ThresholdConfig& cfg, int B, double alpha, std::uint64_t seed) {
  require(B >= 1, ErrorKind::InvalidArgument, "bootstrap needs at least one draw");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  require(center.size() == V.length() && weights.cols() == V.length() && weights.rows() == V.replicates(),
          ErrorKind::DimensionMismatch, "bootstrap inputs do not match");
  std::vector<double> dist(static_cast<std::size_t>(B));
  parallel_for(dist.size(), [&](std::size_t b) {
    Matrix draw = draw_gaussian_panel(V, derive_seed(seed, b));
    draw.rowwise() += center.transpose();
    const CoefficientPanel panel(std::move(draw));
    const Vector h = estimate_fixed_effects(panel, weights, select_fixed_set(panel, cfg));
    dist[b] = (h - center).norm();
  });
  std::sort(dist.begin(), dist.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(B))) - 1;
  ConfidenceRegion region;
  region.center = center;
  region.radius = dist[std::min(idx, dist.size() - 1)];
  region.level = 1.0 - alpha;
  region.method = RegionMethod::Bootstrap;
  region.seed = seed;
  return region;
}

ConfidenceRegion bootstrap_region(const ModelFit& fit, const ThresholdConfig& cfg, int B, double alpha,
                                  std::uint64_t seed) {
  return bootstrap_region(fit.h_hat, fit.covariance(), fit.weights, cfg, B, alpha, seed);
}

}  // namespace specmix
