#pragma once

#include "specmix/types.hpp"

namespace specmix {

// Symmetric unit-diagonal matrix together with its smallest eigenvalue.
class CorrelationMatrix {
 public:
  static constexpr double kPsdTolerance = 1e-8;

  CorrelationMatrix() = default;
  // Throws DimensionMismatch / InvalidArgument unless m is square, symmetric
  // to 1e-12 and unit-diagonal.
  explicit CorrelationMatrix(Matrix m);
  static CorrelationMatrix identity(Index S);

  const Matrix& entries() const noexcept { return entries_; }
  Index size() const noexcept { return entries_.rows(); }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  bool psd_certified() const noexcept { return min_eigenvalue_ >= -kPsdTolerance; }

 private:
  Matrix entries_;
  double min_eigenvalue_ = 1.0;
};

struct NearestCorrelationOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

struct NearestCorrelationResult {
  CorrelationMatrix matrix;
  int iterations = 0;
  bool converged = false;
};

// Frobenius-nearest correlation matrix by alternating projections with
// Dykstra's correction.
NearestCorrelationResult nearest_correlation(const Matrix& M, const NearestCorrelationOptions& opts = {});

// Clip negative eigenvalues to zero and rescale to unit diagonal.
Matrix eigenvalue_clipping(const Matrix& M);

Matrix project_psd(const Matrix& M);

}  // namespace specmix
