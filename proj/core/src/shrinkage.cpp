#include "specmix/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "specmix/special_functions.hpp"
#include "specmix/wavelet.hpp"

namespace specmix {

void ThresholdConfig::validate(Index T) const {
  require(sigma_e2 > 0.0, ErrorKind::InvalidArgument, "sigma_e2 must be positive");
  if (const auto* u = std::get_if<UniversalSelection>(&rule)) {
    require(u->k_h >= 1 && u->k_h < T, ErrorKind::InvalidSparsity,
            "k_h must satisfy 1 <= k_h < T, got " + std::to_string(u->k_h));
  } else {
    const double q = std::get<FdrSelection>(rule).q;
    require(q > 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "FDR level must lie in (0, 1]");
  }
  if (scale_cutoff) {
    require(scale_cutoff->alpha > 0.0 && scale_cutoff->alpha <= 1.0, ErrorKind::InvalidArgument,
            "scale cutoff alpha must lie in (0, 1]");
    require(scale_cutoff->C > 0.0, ErrorKind::InvalidArgument, "scale cutoff C must be positive");
  }
}

double universal_threshold_h(Index S, Index T, Index k_h, double sigma_e2) {
  require(S >= 1 && T >= 1, ErrorKind::InvalidArgument, "S and T must be positive");
  require(k_h >= 1 && k_h < T, ErrorKind::InvalidSparsity,
          "k_h must satisfy 1 <= k_h < T, got " + std::to_string(k_h));
  const double ST = static_cast<double>(S) * static_cast<double>(T);
  return std::sqrt(sigma_e2 / ST) *
         std::sqrt(2.0 * std::log(static_cast<double>(T) / static_cast<double>(k_h)));
}

double universal_threshold_u(Index S, Index T) {
  require(S >= 1 && T >= 2, ErrorKind::InvalidArgument, "requires S >= 1 and T >= 2");
  return std::sqrt(trigamma(0.5 * static_cast<double>(S))) *
         std::sqrt(2.0 * std::log(static_cast<double>(T)));
}

SelectedSet fdr_select(const Vector& z, double noise_sd, double q) {
  require(noise_sd > 0.0, ErrorKind::InvalidArgument, "noise_sd must be positive");
  require(q > 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "FDR level must lie in (0, 1]");
  const Index T = z.size();
  std::vector<double> p(static_cast<std::size_t>(T));
  for (Index k = 0; k < T; ++k)
    p[static_cast<std::size_t>(k)] = std::erfc(std::abs(z[k]) / noise_sd / std::numbers::sqrt2);
  std::vector<Index> order(static_cast<std::size_t>(T));
  std::iota(order.begin(), order.end(), Index{0});
  // Ordered by |z| so p-values that underflow to zero keep their ranking.
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(z[a]) > std::abs(z[b]); });
  Index m = 0;
  for (Index r = T; r >= 1; --r) {
    if (p[static_cast<std::size_t>(order[static_cast<std::size_t>(r - 1)])] <=
        q * static_cast<double>(r) / static_cast<double>(T)) {
      m = r;
      break;
    }
  }
  if (m == 0) return SelectedSet({}, std::numeric_limits<double>::infinity());
  const double cut = std::abs(z[order[static_cast<std::size_t>(m - 1)]]);
  std::vector<bool> mask(static_cast<std::size_t>(T));
  for (Index k = 0; k < T; ++k) mask[static_cast<std::size_t>(k)] = std::abs(z[k]) >= cut;
  return SelectedSet::from_mask(mask, cut);
}

double variance_statistic(const Vector& Yk, double h_k_hat, Index T, double sigma_e2) {
  const Index S = Yk.size();
  require(S >= 2, ErrorKind::InvalidArgument, "variance statistic needs at least two replicates");
  const double ss = (Yk.array() - h_k_hat).square().sum();
  require(ss > 0.0, ErrorKind::DegenerateVariance, "residual sum of squares is zero");
  const double Sd = static_cast<double>(S);
  return std::log(ss / Sd) - std::log(2.0 * sigma_e2 / (Sd * static_cast<double>(T))) -
         digamma(0.5 * Sd);
}

std::vector<bool> scale_cutoff_mask(Index T, const std::optional<ScaleCutoff>& cutoff) {
  std::vector<bool> mask(static_cast<std::size_t>(T), true);
  if (!cutoff) return mask;
  const double bound = cutoff->C * std::pow(static_cast<double>(T), 1.0 - cutoff->alpha);
  for (Index k = 2; k <= T; ++k)
    mask[static_cast<std::size_t>(k - 1)] = std::ldexp(1.0, scale_of_index(k, T)) <= bound;
  return mask;
}

}  // namespace specmix
