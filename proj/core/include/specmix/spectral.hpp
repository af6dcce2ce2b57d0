#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "specmix/types.hpp"

namespace specmix {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// omega_l = l / (2T), l = 0..T-1.
Vector fourier_frequencies(Index T);

// Raw periodogram I(omega_l) = |sum_t x(t) e^{-2 pi i omega_l t}|^2 / N for
// l = 0..N/2 (both boundary bins included), N = x.size() dyadic.
Vector periodogram(std::span<const double> x);

// Bias-corrected log-periodogram on the T = N/2 frequencies in [0, 1/2).
// Throws ZeroPowerBin if any bin has zero power.
Vector log_periodogram(std::span<const double> x);
LogPeriodogramPanel log_periodogram(const TimeSeriesPanel& panel);

struct ArmaModel {
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // theta_1..theta_q
  double innovation_variance = 1.0;
};

inline constexpr std::string_view kArmaSignConvention =
    "AR polynomial 1 - sum_p phi_p z^p, MA polynomial 1 + sum_q theta_q z^q, "
    "z = exp(-2 pi i omega)";

// Modulus floor applied to the MA polynomial. An MA zero on the unit circle
// that falls on the grid would otherwise give log(0) (or a value set by
// rounding noise); the floor keeps the curve finite and deterministic.
inline constexpr double kMaModulusFloor = 1e-12;

// log( sigma_w^2 |theta(z)|^2 / |phi(z)|^2 ) on omega_l = l/(2T). Throws
// UnstableModel if |phi(z)| < 1e-12 at any grid point.
Vector arma_log_spectrum(const ArmaModel& model, Index T, double ma_modulus_floor = kMaModulusFloor);

// The benchmark model: phi = (-0.2, -0.9), theta = (0, 1), sigma_w^2 = 1.
ArmaModel benchmark_arma_model();

}  // namespace specmix
