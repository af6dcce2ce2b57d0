#pragma once

#include <span>

#include "specmix/types.hpp"

namespace specmix {

enum class WaveletFamily { DaubechiesExtremalPhase };

// Orthonormal periodized wavelet basis. The transform is scaled by 1/sqrt(T)
// so that an orthonormal-noise input of variance v maps to coefficients of
// variance v/T.
struct WaveletBasisSpec {
  WaveletFamily family = WaveletFamily::DaubechiesExtremalPhase;
  int vanishing_moments = 6;
};

inline constexpr int kMaxVanishingMoments = 10;
inline constexpr const char* kWaveletNormalization = "paper-1/sqrtT";

// Scaling (low-pass) filter of length 2N, sum = sqrt(2).
std::span<const double> scaling_filter(int vanishing_moments);

// Largest deviation from the orthonormality and quadrature-mirror conditions
// over all embedded filters.
double filter_orthonormality_error();

Vector dwt(const Vector& v, const WaveletBasisSpec& basis = {});
Vector idwt(const Vector& c, const WaveletBasisSpec& basis = {});

// Row-wise transforms (each row is one replicate).
Matrix dwt_rows(const Matrix& rows, const WaveletBasisSpec& basis = {});
Matrix idwt_rows(const Matrix& rows, const WaveletBasisSpec& basis = {});

CoefficientPanel to_coefficients(const LogPeriodogramPanel& panel, const WaveletBasisSpec& basis = {});

// Scale j of the one-based scale-location index k: -1 for the scaling
// coefficient k = 1, floor(log2(k - 1)) otherwise.
int scale_of_index(Index k, Index T);

struct SparseCoefficients {
  Vector values;
  SelectedSet support;
};

// Hard-zeroes entries with |h_k| < tol.
SparseCoefficients sparsify(const Vector& h, double tol);

}  // namespace specmix
