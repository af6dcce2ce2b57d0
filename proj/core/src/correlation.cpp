#include "specmix/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace specmix {
namespace {

double smallest_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

Matrix unit_diagonal_rescale(const Matrix& X) {
  Vector d = X.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  Matrix out = d.asDiagonal() * X * d.asDiagonal();
  out = 0.5 * (out + out.transpose());
  out.diagonal().setOnes();
  return out;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix m) : entries_(std::move(m)) {
  require(entries_.rows() == entries_.cols(), ErrorKind::DimensionMismatch,
          "correlation matrix must be square");
  require(entries_.allFinite(), ErrorKind::InvalidArgument, "correlation matrix must be finite");
  const Index S = entries_.rows();
  for (Index i = 0; i < S; ++i) {
    require(std::abs(entries_(i, i) - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
            "correlation matrix diagonal must be one (row " + std::to_string(i) + ")");
    for (Index j = 0; j < i; ++j)
      require(std::abs(entries_(i, j) - entries_(j, i)) <= 1e-12, ErrorKind::InvalidArgument,
              "correlation matrix must be symmetric");
  }
  entries_ = 0.5 * (entries_ + entries_.transpose());
  entries_.diagonal().setOnes();
  min_eigenvalue_ = smallest_eigenvalue(entries_);
}

CorrelationMatrix CorrelationMatrix::identity(Index S) {
  return CorrelationMatrix(Matrix::Identity(S, S));
}

Matrix project_psd(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()));
  const Vector lambda = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Matrix eigenvalue_clipping(const Matrix& M) { return unit_diagonal_rescale(project_psd(M)); }

NearestCorrelationResult nearest_correlation(const Matrix& M, const NearestCorrelationOptions& opts) {
  require(M.rows() == M.cols(), ErrorKind::DimensionMismatch, "input must be square");
  require(M.allFinite(), ErrorKind::InvalidArgument, "input must be finite");
  NearestCorrelationResult result;
  Matrix Y = 0.5 * (M + M.transpose());
  Y.diagonal().setOnes();
  if (smallest_eigenvalue(Y) >= 0.0) {
    result.matrix = CorrelationMatrix(Y);
    result.converged = true;
    return result;
  }
  Matrix correction = Matrix::Zero(Y.rows(), Y.cols());
  Matrix X = Y;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Matrix R = Y - correction;
    X = project_psd(R);
    correction = X - R;
    Matrix next = X;
    next.diagonal().setOnes();
    const double change = (next - Y).norm();
    Y = std::move(next);
    result.iterations = it;
    if (change <= opts.tolerance) {
      result.converged = true;
      break;
    }
  }
  // The unit-diagonal iterate can retain a tiny negative eigenvalue; the PSD
  // iterate rescaled to unit diagonal cannot.
  if (smallest_eigenvalue(Y) < 0.0) Y = unit_diagonal_rescale(X);
  result.matrix = CorrelationMatrix(Y);
  return result;
}

}  // namespace specmix
