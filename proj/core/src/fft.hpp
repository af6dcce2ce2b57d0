#pragma once

#include <complex>
#include <span>

namespace specmix::detail {

// out[l] = sum_n x[n] exp(-2 pi i l n / N), l = 0..N/2.
void fft_forward_real(std::span<const double> x, std::span<std::complex<double>> out);

// out[n] = sum_l in[l] exp(+2 pi i l n / N), unnormalized.
void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace specmix::detail
