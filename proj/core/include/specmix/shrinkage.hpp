#pragma once

#include <numbers>
#include <optional>
#include <variant>

#include "specmix/types.hpp"

namespace specmix {

inline constexpr double kLogChiSquareVariance = std::numbers::pi * std::numbers::pi / 6.0;

// Non-adaptive selection with the universal threshold for sparsity k_h.
struct UniversalSelection {
  Index k_h = 1;
};

// Adaptive selection by false discovery rate control at level q.
struct FdrSelection {
  double q = 0.001;
};

using SelectionRule = std::variant<UniversalSelection, FdrSelection>;

struct ScaleCutoff {
  double alpha = 0.5;
  double C = 1.0;
};

struct ThresholdConfig {
  double sigma_e2 = kLogChiSquareVariance;
  SelectionRule rule = FdrSelection{};
  // Without a cutoff every scale is eligible.
  std::optional<ScaleCutoff> scale_cutoff;

  void validate(Index T) const;
};

double universal_threshold_h(Index S, Index T, Index k_h, double sigma_e2);
double universal_threshold_u(Index S, Index T);

// Two-sided Benjamini-Hochberg step-up on z / noise_sd.
SelectedSet fdr_select(const Vector& z, double noise_sd, double q);

// Log sample variance of the residuals Y_k - h_k, centered by its null
// expectation.
double variance_statistic(const Vector& Yk, double h_k_hat, Index T, double sigma_e2);

// Positions (zero-based) whose scale satisfies 2^j <= C T^(1 - alpha); the
// scaling coefficient is always included.
std::vector<bool> scale_cutoff_mask(Index T, const std::optional<ScaleCutoff>& cutoff);

}  // namespace specmix
