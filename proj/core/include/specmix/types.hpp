#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "specmix/error.hpp"

namespace specmix {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr bool is_power_of_two(Index n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

inline std::span<const double> as_span(const Vector& v) noexcept {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Sorted set of zero-based coefficient positions (position i holds the
// scale-location index k = i + 1).
class SelectedSet {
 public:
  SelectedSet() = default;
  SelectedSet(std::vector<Index> indices, double threshold_used);

  static SelectedSet from_mask(const std::vector<bool>& mask, double threshold_used);
  static SelectedSet all(Index T);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  double threshold_used() const noexcept { return threshold_used_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index i) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }
  std::vector<bool> mask(Index T) const;
  bool is_subset_of(const SelectedSet& other) const;
  SelectedSet intersect(const SelectedSet& other) const;

  friend bool operator==(const SelectedSet& a, const SelectedSet& b) {
    return a.indices_ == b.indices_;
  }

 private:
  std::vector<Index> indices_;
  double threshold_used_ = 0.0;
};

enum class PanelDomain { Time, Frequency, Coefficient };

// Replicates are rows. The column axis depends on the domain: t = 1..2T for
// time series, omega_l = l/(2T) for log-periodograms, k = 1..T for wavelet
// coefficients. Panels are immutable once constructed.
template <PanelDomain D>
class PanelOf {
 public:
  static constexpr PanelDomain domain = D;

  PanelOf() = default;
  explicit PanelOf(Matrix values) : values_(std::move(values)) {
    require(values_.allFinite(), ErrorKind::InvalidArgument, "panel entries must be finite");
    if constexpr (D == PanelDomain::Time) {
      require(is_power_of_two(values_.cols()) && values_.cols() >= 2, ErrorKind::NonDyadicLength,
              "time series length must be a power of two");
    }
  }

  const Matrix& values() const noexcept { return values_; }
  Index replicates() const noexcept { return values_.rows(); }
  Index length() const noexcept { return values_.cols(); }

  auto row(Index s) const { return values_.row(s); }
  auto col(Index k) const { return values_.col(k); }
  double operator()(Index s, Index k) const { return values_(s, k); }

 private:
  Matrix values_;
};

using TimeSeriesPanel = PanelOf<PanelDomain::Time>;
using LogPeriodogramPanel = PanelOf<PanelDomain::Frequency>;
using CoefficientPanel = PanelOf<PanelDomain::Coefficient>;

}  // namespace specmix
