#pragma once

#include <optional>

#include "specmix/correlation.hpp"
#include "specmix/shrinkage.hpp"
#include "specmix/types.hpp"
#include "specmix/wavelet.hpp"

namespace specmix {

// V_k = sigma_u2[k] * G_S + noise_variance * I for every coefficient k, with
// G_S diagonalized once so per-k solves, square roots and determinants cost
// O(S^2).
class CovarianceModel {
 public:
  CovarianceModel() = default;
  CovarianceModel(Vector sigma_u2, const Matrix& G_S, double noise_variance);

  Index replicates() const noexcept { return eigenvectors_.rows(); }
  Index length() const noexcept { return sigma_u2_.size(); }
  const Vector& sigma_u2() const noexcept { return sigma_u2_; }
  const Matrix& correlation() const noexcept { return G_; }
  double noise_variance() const noexcept { return noise_; }

  Matrix V(Index k) const;
  // Eigenvalues of V_k in the shared eigenbasis.
  Vector spectrum(Index k) const;
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }

  Vector solve(Index k, const Vector& b) const;
  Vector gls_weights(Index k) const;
  // S x T matrix whose column k holds the GLS weights for V_k.
  Matrix gls_weight_matrix() const;
  // Symmetric square root of V_k applied to z.
  Vector sqrt_apply(Index k, const Vector& z) const;
  // Column k of the result is V_k^{1/2} Z.col(k).
  Matrix sqrt_apply_columns(const Matrix& Z) const;
  // Frobenius mass of the negative eigenvalues of G_S removed by clipping,
  // relative to the total.
  double clipped_mass() const noexcept { return clipped_mass_; }

  CovarianceModel scaled(double factor) const;

 private:
  Vector sigma_u2_;
  Matrix G_;
  Matrix eigenvectors_;
  Vector g_eigenvalues_;
  double noise_ = 0.0;
  double clipped_mass_ = 0.0;
};

struct RandomEffectsCovariance {
  Vector sigma_u2;
  SelectedSet K_u;
  CorrelationMatrix G_S;

  CovarianceModel model(double sigma_e2) const;
};

enum class WeightsMode { OLS, GLS };

struct FitConfig {
  ThresholdConfig threshold;
  double delta = 0.01;
  double tolerance = 1e-6;
  int max_iterations = 20;
  NearestCorrelationOptions projection;
};

struct ModelFit {
  Vector h_hat;
  SelectedSet K_h;
  RandomEffectsCovariance re_cov;
  // S x T, column k sums to one.
  Matrix weights;
  WeightsMode weights_mode = WeightsMode::OLS;
  int iterations = 0;
  bool converged = false;
  double delta = 0.01;
  double sigma_e2 = kLogChiSquareVariance;
  // Correlation estimate before the nearest-correlation repair.
  Matrix G_raw;

  Index replicates() const noexcept { return weights.rows(); }
  Index length() const noexcept { return h_hat.size(); }
  CovarianceModel covariance() const { return re_cov.model(sigma_e2); }
};

Vector ols_weights(Index S);
Matrix ols_weight_matrix(Index S, Index T);

// Solves V x = 1 and normalizes. A failed Cholesky factorization is retried
// once with a 1e-10 ridge before raising SingularCovariance.
Vector gls_weights(const Matrix& V);

Vector estimate_fixed_effects(const CoefficientPanel& Y, const Matrix& weights, const SelectedSet& K_h);

SelectedSet select_fixed_set(const CoefficientPanel& Y, const ThresholdConfig& cfg);

struct VarianceComponents {
  Vector sigma_u2;
  SelectedSet K_u;
  Vector statistics;
};

// K_u = {k in K_h : |T_k| >= lambda_u and the positive-part variance is
// nonzero}.
VarianceComponents estimate_variance_components(const CoefficientPanel& Y, const Vector& h_hat,
                                                const SelectedSet& K_h, const ThresholdConfig& cfg);

// Raw pairwise correlation estimate clipped to [-1, 1] with unit diagonal.
Matrix estimate_between_correlation(const CoefficientPanel& Y, const Vector& h_hat, const Vector& sigma_u2,
                                    const SelectedSet& K_u, double delta);

Vector rescale_variances(const Vector& sigma_u2_hat, const Matrix& G_hat, const CorrelationMatrix& G_tilde);

struct CovarianceEstimate {
  RandomEffectsCovariance re_cov;
  Matrix G_raw;
};

// Variance components, correlation and its repair for a given fixed-effects
// estimate.
CovarianceEstimate estimate_covariance(const CoefficientPanel& Y, const Vector& h_hat, const SelectedSet& K_h,
                                       const FitConfig& cfg);

// Fixed weights (for example the true GLS weights), single covariance
// estimate, no iteration.
ModelFit fit_with_weights(const CoefficientPanel& Y, const Matrix& weights, const FitConfig& cfg);

ModelFit fit_ols(const CoefficientPanel& Y, const FitConfig& cfg);

ModelFit fit_iterative_gls(const CoefficientPanel& Y, const FitConfig& cfg,
                           const std::optional<Vector>& warm_start = std::nullopt);

CoefficientPanel predict_random_effects(const CoefficientPanel& Y, const ModelFit& fit);

// Replicate log-spectra idwt(h_hat + U_hat_s) on the Fourier grid, or the
// spectra themselves when exponentiate is set.
Matrix predict_replicate_spectra(const ModelFit& fit, const CoefficientPanel& U_hat, bool exponentiate = false,
                                 const WaveletBasisSpec& basis = {});

// Exact mean squared error of w'xi * 1{|mean(xi)| >= lambda} for
// xi ~ N(h 1, V).
double closed_form_mse(double h, double lambda, const Matrix& V, const Vector& w);

}  // namespace specmix
