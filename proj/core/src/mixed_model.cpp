#include "specmix/mixed_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "specmix/special_functions.hpp"

namespace specmix {

CovarianceModel::CovarianceModel(Vector sigma_u2, const Matrix& G_S, double noise_variance)
    : sigma_u2_(std::move(sigma_u2)), G_(G_S), noise_(noise_variance) {
  require(G_S.rows() == G_S.cols() && G_S.rows() >= 1, ErrorKind::DimensionMismatch,
          "between-replicate correlation must be square and nonempty");
  require(noise_variance >= 0.0, ErrorKind::InvalidArgument, "noise variance must be nonnegative");
  require((sigma_u2_.array() >= 0.0).all(), ErrorKind::InvalidArgument,
          "variance components must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G_S + G_S.transpose()));
  eigenvectors_ = es.eigenvectors();
  g_eigenvalues_ = es.eigenvalues().cwiseMax(0.0);
  const double total = es.eigenvalues().norm();
  clipped_mass_ = total > 0.0 ? (es.eigenvalues() - g_eigenvalues_).norm() / total : 0.0;
}

Matrix CovarianceModel::V(Index k) const {
  Matrix out = sigma_u2_[k] * G_;
  out.diagonal().array() += noise_;
  return out;
}

Vector CovarianceModel::spectrum(Index k) const {
  return (sigma_u2_[k] * g_eigenvalues_.array() + noise_).matrix();
}

Vector CovarianceModel::solve(Index k, const Vector& b) const {
  const Vector lambda = spectrum(k);
  require((lambda.array() > 0.0).all(), ErrorKind::SingularCovariance,
          "covariance of coefficient " + std::to_string(k + 1) + " is singular");
  return eigenvectors_ * (eigenvectors_.transpose() * b).cwiseQuotient(lambda);
}

Vector CovarianceModel::gls_weights(Index k) const {
  const Vector x = solve(k, Vector::Ones(replicates()));
  const double total = x.sum();
  require(total > 0.0 && std::isfinite(total), ErrorKind::SingularCovariance,
          "GLS normalization failed for coefficient " + std::to_string(k + 1));
  return x / total;
}

Matrix CovarianceModel::gls_weight_matrix() const {
  Matrix W(replicates(), length());
  for (Index k = 0; k < length(); ++k) W.col(k) = gls_weights(k);
  return W;
}

Vector CovarianceModel::sqrt_apply(Index k, const Vector& z) const {
  const Vector root = spectrum(k).cwiseSqrt();
  return eigenvectors_ * root.cwiseProduct(eigenvectors_.transpose() * z);
}

Matrix CovarianceModel::sqrt_apply_columns(const Matrix& Z) const {
  require(Z.rows() == replicates() && Z.cols() == length(), ErrorKind::DimensionMismatch,
          "draw matrix does not match the covariance model");
  Matrix rotated = eigenvectors_.transpose() * Z;
  for (Index k = 0; k < length(); ++k)
    rotated.col(k).array() *= (sigma_u2_[k] * g_eigenvalues_.array() + noise_).sqrt();
  return eigenvectors_ * rotated;
}

CovarianceModel CovarianceModel::scaled(double factor) const {
  require(factor >= 0.0, ErrorKind::InvalidArgument, "scale factor must be nonnegative");
  CovarianceModel out = *this;
  out.sigma_u2_ *= factor;
  out.noise_ *= factor;
  return out;
}

CovarianceModel RandomEffectsCovariance::model(double sigma_e2) const {
  return CovarianceModel(sigma_u2, G_S.entries(), sigma_e2 / static_cast<double>(sigma_u2.size()));
}

Vector ols_weights(Index S) {
  require(S >= 1, ErrorKind::InvalidArgument, "need at least one replicate");
  return Vector::Constant(S, 1.0 / static_cast<double>(S));
}

Matrix ols_weight_matrix(Index S, Index T) {
  require(S >= 1, ErrorKind::InvalidArgument, "need at least one replicate");
  return Matrix::Constant(S, T, 1.0 / static_cast<double>(S));
}

Vector gls_weights(const Matrix& V) {
  require(V.rows() == V.cols() && V.rows() >= 1, ErrorKind::DimensionMismatch, "V must be square");
  const Vector ones = Vector::Ones(V.rows());
  Eigen::LLT<Matrix> llt(V);
  if (llt.info() != Eigen::Success) {
    Matrix ridged = V;
    ridged.diagonal().array() += 1e-10;
    llt.compute(ridged);
    require(llt.info() == Eigen::Success, ErrorKind::SingularCovariance,
            "covariance matrix is not positive definite");
  }
  const Vector x = llt.solve(ones);
  const double total = x.sum();
  require(std::isfinite(total) && std::abs(total) > 0.0, ErrorKind::SingularCovariance,
          "GLS weights cannot be normalized");
  return x / total;
}

Vector estimate_fixed_effects(const CoefficientPanel& Y, const Matrix& weights, const SelectedSet& K_h) {
  require(weights.rows() == Y.replicates() && weights.cols() == Y.length(), ErrorKind::DimensionMismatch,
          "weight matrix does not match the panel");
  Vector h = Vector::Zero(Y.length());
  for (Index k : K_h.indices()) h[k] = weights.col(k).dot(Y.col(k));
  return h;
}

SelectedSet select_fixed_set(const CoefficientPanel& Y, const ThresholdConfig& cfg) {
  const Index S = Y.replicates();
  const Index T = Y.length();
  cfg.validate(T);
  const Vector mean = Y.values().colwise().mean().transpose();
  const std::vector<bool> allowed = scale_cutoff_mask(T, cfg.scale_cutoff);
  std::vector<bool> mask(static_cast<std::size_t>(T), false);
  double threshold = 0.0;
  if (const auto* u = std::get_if<UniversalSelection>(&cfg.rule)) {
    threshold = universal_threshold_h(S, T, u->k_h, cfg.sigma_e2);
    for (Index k = 0; k < T; ++k) mask[static_cast<std::size_t>(k)] = std::abs(mean[k]) >= threshold;
  } else {
    const double scale = std::sqrt(static_cast<double>(S) * static_cast<double>(T) / cfg.sigma_e2);
    const SelectedSet fdr = fdr_select(scale * mean, 1.0, std::get<FdrSelection>(cfg.rule).q);
    threshold = fdr.threshold_used() / scale;
    mask = fdr.mask(T);
  }
  for (Index k = 0; k < T; ++k)
    mask[static_cast<std::size_t>(k)] = mask[static_cast<std::size_t>(k)] && allowed[static_cast<std::size_t>(k)];
  return SelectedSet::from_mask(mask, threshold);
}

VarianceComponents estimate_variance_components(const CoefficientPanel& Y, const Vector& h_hat,
                                                const SelectedSet& K_h, const ThresholdConfig& cfg) {
  const Index S = Y.replicates();
  const Index T = Y.length();
  require(h_hat.size() == T, ErrorKind::DimensionMismatch, "h_hat does not match the panel");
  require(h_hat.allFinite(), ErrorKind::InvalidArgument, "h_hat must be finite");
  VarianceComponents out{Vector::Zero(T), {}, Vector::Zero(T)};
  if (S < 2) {
    out.K_u = SelectedSet({}, std::numeric_limits<double>::infinity());
    return out;
  }
  const double lambda = universal_threshold_u(S, T);
  const double noise = cfg.sigma_e2 / static_cast<double>(T);
  std::vector<Index> keep;
  for (Index k = 0; k < T; ++k) {
    const double ss = (Y.col(k).array() - h_hat[k]).square().sum();
    if (ss <= 0.0) {
      out.statistics[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    out.statistics[k] = variance_statistic(Y.col(k), h_hat[k], T, cfg.sigma_e2);
    // The lower tail of |T_k| >= lambda always has a zero positive part, so
    // the selected set is the support of the thresholded variances.
    const double excess = ss / static_cast<double>(S) - noise;
    if (std::abs(out.statistics[k]) >= lambda && excess > 0.0 && K_h.contains(k)) {
      keep.push_back(k);
      out.sigma_u2[k] = excess;
    }
  }
  out.K_u = SelectedSet(std::move(keep), lambda);
  return out;
}

Matrix estimate_between_correlation(const CoefficientPanel& Y, const Vector& h_hat, const Vector& sigma_u2,
                                    const SelectedSet& K_u, double delta) {
  require(delta > 0.0, ErrorKind::InvalidArgument, "delta must be positive");
  require(!K_u.empty(), ErrorKind::EmptyRandomEffectSet, "no random-effect coefficients selected");
  const Index S = Y.replicates();
  const std::size_t n = K_u.size();
  Matrix R(S, static_cast<Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    const Index k = K_u.indices()[c];
    R.col(static_cast<Index>(c)) = (Y.col(k).array() - h_hat[k]) / std::sqrt(std::max(sigma_u2[k], delta));
  }
  Matrix rho = (R * R.transpose()) / static_cast<double>(n);
  for (Index i = 0; i < S; ++i) {
    rho(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      const double v = std::clamp(rho(i, j), -1.0, 1.0);
      rho(i, j) = v;
      rho(j, i) = v;
    }
  }
  return rho;
}

Vector rescale_variances(const Vector& sigma_u2_hat, const Matrix& G_hat, const CorrelationMatrix& G_tilde) {
  const double denom = G_tilde.entries().norm();
  require(denom > 0.0, ErrorKind::InvalidArgument, "repaired correlation has zero norm");
  return sigma_u2_hat * (G_hat.norm() / denom);
}

CovarianceEstimate estimate_covariance(const CoefficientPanel& Y, const Vector& h_hat, const SelectedSet& K_h,
                                       const FitConfig& cfg) {
  const Index S = Y.replicates();
  VarianceComponents vc = estimate_variance_components(Y, h_hat, K_h, cfg.threshold);
  CovarianceEstimate out;
  if (vc.K_u.empty() || S < 3) {
    out.re_cov = {std::move(vc.sigma_u2), std::move(vc.K_u), CorrelationMatrix::identity(S)};
    out.G_raw = Matrix::Identity(S, S);
    return out;
  }
  out.G_raw = estimate_between_correlation(Y, h_hat, vc.sigma_u2, vc.K_u, cfg.delta);
  NearestCorrelationResult repaired = nearest_correlation(out.G_raw, cfg.projection);
  Vector sigma = rescale_variances(vc.sigma_u2, out.G_raw, repaired.matrix);
  out.re_cov = {std::move(sigma), std::move(vc.K_u), std::move(repaired.matrix)};
  return out;
}

namespace {

ModelFit assemble(Vector h, SelectedSet K_h, CovarianceEstimate cov, Matrix W, WeightsMode mode,
                  const FitConfig& cfg) {
  ModelFit fit;
  fit.h_hat = std::move(h);
  fit.K_h = std::move(K_h);
  fit.re_cov = std::move(cov.re_cov);
  fit.G_raw = std::move(cov.G_raw);
  fit.weights = std::move(W);
  fit.weights_mode = mode;
  fit.delta = cfg.delta;
  fit.sigma_e2 = cfg.threshold.sigma_e2;
  return fit;
}

double relative_change(const Vector& now, const Vector& before) {
  return (now - before).norm() / std::max(before.norm(), 1e-12);
}

}  // namespace

ModelFit fit_with_weights(const CoefficientPanel& Y, const Matrix& weights, const FitConfig& cfg) {
  const SelectedSet K_h = select_fixed_set(Y, cfg.threshold);
  Vector h = estimate_fixed_effects(Y, weights, K_h);
  CovarianceEstimate cov = estimate_covariance(Y, h, K_h, cfg);
  ModelFit fit = assemble(std::move(h), K_h, std::move(cov), weights, WeightsMode::GLS, cfg);
  fit.converged = true;
  return fit;
}

ModelFit fit_ols(const CoefficientPanel& Y, const FitConfig& cfg) {
  ModelFit fit = fit_with_weights(Y, ols_weight_matrix(Y.replicates(), Y.length()), cfg);
  fit.weights_mode = WeightsMode::OLS;
  return fit;
}

ModelFit fit_iterative_gls(const CoefficientPanel& Y, const FitConfig& cfg, const std::optional<Vector>& warm_start) {
  const Index S = Y.replicates();
  const Index T = Y.length();
  require(cfg.max_iterations >= 1, ErrorKind::InvalidArgument, "max_iterations must be positive");
  const SelectedSet K_h = select_fixed_set(Y, cfg.threshold);
  Matrix W = ols_weight_matrix(S, T);
  Vector h;
  if (warm_start) {
    require(warm_start->size() == T, ErrorKind::DimensionMismatch, "warm start does not match the panel");
    h = *warm_start;
    for (Index k = 0; k < T; ++k)
      if (!K_h.contains(k)) h[k] = 0.0;
  } else {
    h = estimate_fixed_effects(Y, W, K_h);
  }
  if (S == 1) {
    CovarianceEstimate cov = estimate_covariance(Y, h, K_h, cfg);
    ModelFit fit = assemble(std::move(h), K_h, std::move(cov), std::move(W), WeightsMode::OLS, cfg);
    fit.converged = true;
    return fit;
  }
  CovarianceEstimate cov;
  bool converged = false;
  int it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    cov = estimate_covariance(Y, h, K_h, cfg);
    W = cov.re_cov.model(cfg.threshold.sigma_e2).gls_weight_matrix();
    Vector next = estimate_fixed_effects(Y, W, K_h);
    const double change = relative_change(next, h);
    h = std::move(next);
    if (change <= cfg.tolerance) {
      converged = true;
      break;
    }
  }
  ModelFit fit = assemble(std::move(h), K_h, std::move(cov), std::move(W), WeightsMode::GLS, cfg);
  fit.iterations = it;
  fit.converged = converged;
  return fit;
}

CoefficientPanel predict_random_effects(const CoefficientPanel& Y, const ModelFit& fit) {
  const Index S = Y.replicates();
  const Index T = Y.length();
  require(fit.length() == T && fit.re_cov.G_S.size() == S, ErrorKind::DimensionMismatch,
          "model does not match the panel");
  const CovarianceModel model = fit.covariance();
  const Matrix& Q = model.eigenvectors();
  Matrix U = Matrix::Zero(S, T);
  for (Index k : fit.re_cov.K_u.indices()) {
    const double s2 = fit.re_cov.sigma_u2[k];
    if (s2 <= 0.0) continue;
    const Vector lambda = model.spectrum(k);
    require((lambda.array() > 0.0).all(), ErrorKind::SingularCovariance,
            "covariance of coefficient " + std::to_string(k + 1) + " is singular");
    const Vector gain = (lambda.array() - model.noise_variance()) / lambda.array();
    const Vector r = Y.col(k).array() - fit.h_hat[k];
    U.col(k) = Q * gain.cwiseProduct(Q.transpose() * r);
  }
  return CoefficientPanel(std::move(U));
}

Matrix predict_replicate_spectra(const ModelFit& fit, const CoefficientPanel& U_hat, bool exponentiate,
                                 const WaveletBasisSpec& basis) {
  require(U_hat.length() == fit.length(), ErrorKind::DimensionMismatch, "random effects do not match the model");
  Matrix H = U_hat.values();
  H.rowwise() += fit.h_hat.transpose();
  Matrix curves = idwt_rows(H, basis);
  if (exponentiate) curves = curves.array().exp().matrix();
  return curves;
}

double closed_form_mse(double h, double lambda, const Matrix& V, const Vector& w) {
  const Index S = V.rows();
  require(V.cols() == S && w.size() == S, ErrorKind::DimensionMismatch, "V and w sizes differ");
  require(lambda >= 0.0, ErrorKind::InvalidArgument, "threshold must be nonnegative");
  const Vector ones = Vector::Ones(S);
  const double Sd = static_cast<double>(S);
  const double wVw = w.dot(V * w);
  const double wV1 = w.dot(V * ones);
  const double sigma2 = ones.dot(V * ones) / Sd;
  require(sigma2 > 0.0, ErrorKind::DegenerateVariance, "mean coefficient has zero variance");
  const double sigma = std::sqrt(sigma2);
  const double a = std::sqrt(Sd) * (lambda - h) / sigma;
  const double b = std::sqrt(Sd) * (lambda + h) / sigma;
  const double c = wV1 * wV1 / (Sd * sigma2);
  const auto tail = [](double x) { return std::isfinite(x) ? x * normal_pdf(x) : 0.0; };
  return (2.0 * wVw - h * h) + (h * h - wVw) * (normal_cdf(a) + normal_cdf(b)) + c * (tail(a) + tail(b));
}

}  // namespace specmix
