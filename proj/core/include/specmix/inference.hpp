#pragma once

#include <cstdint>
#include <string_view>

#include "specmix/mixed_model.hpp"
#include "specmix/types.hpp"

namespace specmix {

enum class RegionDomain { Coefficient, Frequency };
enum class RegionMethod { AsymptoticKnownV, AsymptoticPlugin, Bootstrap };

inline constexpr std::string_view kRadiusConstruction = "conservative_fixed_point";

struct ConfidenceRegion {
  Vector center;
  double radius = 0.0;
  double level = 0.95;
  RegionDomain domain = RegionDomain::Coefficient;
  RegionMethod method = RegionMethod::AsymptoticKnownV;
  std::uint64_t seed = 0;
  // Diagnostics of the asymptotic construction; zero for bootstrap regions.
  double A = 0.0;
  double c = 0.0;
  double risk = 0.0;
  double z = 0.0;

  // Per-coefficient w_k' V_k w_k of the asymptotic construction; empty for
  // bootstrap and frequency-domain regions.
  Vector weighted_variance;

  // Asymptotic regions test membership in the implicit set
  // ||h - center||^2 <= z tau(h, center) + R, which the ball of the reported
  // radius encloses. The set is empty when R is very negative. Other regions
  // are balls.
  bool contains(const Vector& h) const;
  bool ball_contains(const Vector& h) const { return (h - center).norm() <= radius; }
  // Same region on the Fourier grid: center idwt(center), radius sqrt(T) r.
  ConfidenceRegion in_frequency_domain(const WaveletBasisSpec& basis = {}) const;
};

struct SplitPanels {
  CoefficientPanel xi1;
  CoefficientPanel xi2;
};

// (Y - X, Y + X) with X_k ~ N(0, V_k) independent of Y.
SplitPanels split_sample(const CoefficientPanel& Y, const CovarianceModel& V, std::uint64_t seed);

// Unbiased estimate of ||h - h_hat||^2 from xi2 ~ N(h, 2V).
double risk_estimator(const CoefficientPanel& xi2, const Vector& h_hat, const Matrix& weights,
                      const CovarianceModel& V);

double risk_variance(const Vector& h, const Vector& h_hat, const Matrix& weights, const CovarianceModel& V);

struct RadiusTerms {
  double A = 0.0;  // sum_k 8 ||diag(w_k) V_k||_F^2
  double c = 0.0;  // max_k w_k' V_k w_k
  Vector q;        // w_k' V_k w_k
};

RadiusTerms radius_terms(const Matrix& weights, const CovarianceModel& V);

// Bisection for s = r^2 solving s = z sqrt(A + 8 c s) + max(R, 0). Returns
// r = 0 when no nonnegative root exists.
double solve_radius(double z, double A, double c, double R);

// Split, estimate on xi1 with the given weights and selection rule (noise
// variance doubled), estimate the risk on xi2, and solve for the radius.
ConfidenceRegion asymptotic_region(const CoefficientPanel& Y, const CovarianceModel& V, const Matrix& weights,
                                   const ThresholdConfig& cfg, double alpha, std::uint64_t seed);

// Known-V mode uses `known` (or the fitted covariance when absent) with GLS
// weights; plug-in mode uses the fitted covariance with OLS weights.
ConfidenceRegion confidence_region(const CoefficientPanel& Y, const ModelFit& fit, const ThresholdConfig& cfg,
                                   double alpha, RegionMethod method, std::uint64_t seed,
                                   const CovarianceModel* known = nullptr);

// Parametric bootstrap around `center`: B panels N(center, V_k) per
// coefficient, fixed-effects re-estimation with the given weights and rule,
// radius = (1 - alpha) quantile of ||h* - center||.
ConfidenceRegion bootstrap_region(const Vector& center, const CovarianceModel& V, const Matrix& weights,
                                  const ThresholdConfig& cfg, int B, double alpha, std::uint64_t seed);
ConfidenceRegion bootstrap_region(const ModelFit& fit, const ThresholdConfig& cfg, int B, double alpha,
                                  std::uint64_t seed);

// S x T matrix with column k ~ N(0, V_k).
Matrix draw_gaussian_panel(const CovarianceModel& V, std::uint64_t seed);

}  // namespace specmix
