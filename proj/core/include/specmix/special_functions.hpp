#pragma once

namespace specmix {

// Relative error below 1e-12 on x > 0. Throw DomainError for x <= 0.
double digamma(double x);
double trigamma(double x);

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

}  // namespace specmix
