#include "specmix/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "specmix/parallel.hpp"

namespace specmix {

Vector fourier_frequencies(Index T) {
  Vector w(T);
  for (Index l = 0; l < T; ++l) w[l] = static_cast<double>(l) / (2.0 * static_cast<double>(T));
  return w;
}

Vector periodogram(std::span<const double> x) {
  const auto n = static_cast<Index>(x.size());
  require(n >= 2 && is_power_of_two(n), ErrorKind::NonDyadicLength,
          "series length " + std::to_string(n) + " is not a power of two");
  std::vector<std::complex<double>> spec(x.size() / 2 + 1);
  detail::fft_forward_real(x, spec);
  Vector out(static_cast<Index>(spec.size()));
  for (std::size_t l = 0; l < spec.size(); ++l)
    out[static_cast<Index>(l)] = std::norm(spec[l]) / static_cast<double>(n);
  return out;
}

Vector log_periodogram(std::span<const double> x) {
  const Vector power = periodogram(x);
  const Index T = static_cast<Index>(x.size()) / 2;
  Vector out(T);
  for (Index l = 0; l < T; ++l) {
    require(power[l] > 0.0, ErrorKind::ZeroPowerBin,
            "zero power at frequency index " + std::to_string(l));
    out[l] = std::log(power[l]) + kEulerGamma;
  }
  return out;
}

LogPeriodogramPanel log_periodogram(const TimeSeriesPanel& panel) {
  const Index S = panel.replicates();
  const Index T = panel.length() / 2;
  Matrix out(S, T);
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t s) {
    const Vector row = panel.row(static_cast<Index>(s)).transpose();
    out.row(static_cast<Index>(s)) = log_periodogram(as_span(row)).transpose();
  });
  return LogPeriodogramPanel(std::move(out));
}

Vector arma_log_spectrum(const ArmaModel& model, Index T, double ma_modulus_floor) {
  require(T >= 1, ErrorKind::InvalidArgument, "grid size must be positive");
  require(model.innovation_variance > 0.0, ErrorKind::InvalidArgument,
          "innovation variance must be positive");
  Vector out(T);
  for (Index l = 0; l < T; ++l) {
    const double omega = static_cast<double>(l) / (2.0 * static_cast<double>(T));
    std::complex<double> ar(1.0, 0.0), ma(1.0, 0.0);
    for (std::size_t p = 0; p < model.ar.size(); ++p)
      ar -= model.ar[p] * std::polar(1.0, -2.0 * std::numbers::pi * omega * static_cast<double>(p + 1));
    for (std::size_t q = 0; q < model.ma.size(); ++q)
      ma += model.ma[q] * std::polar(1.0, -2.0 * std::numbers::pi * omega * static_cast<double>(q + 1));
    require(std::abs(ar) >= 1e-12, ErrorKind::UnstableModel,
            "AR polynomial vanishes near omega = " + std::to_string(omega));
    const double ma_mod = std::max(std::abs(ma), ma_modulus_floor);
    out[l] = std::log(model.innovation_variance * ma_mod * ma_mod / std::norm(ar));
  }
  return out;
}

ArmaModel benchmark_arma_model() { return ArmaModel{{-0.2, -0.9}, {0.0, 1.0}, 1.0}; }

}  // namespace specmix
