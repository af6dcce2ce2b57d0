#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "specmix/error.hpp"

namespace specmix::detail {

namespace {

enum class PlanKind { ForwardReal, InverseComplex };

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (kind, size) under a lock and never freed.
fftw_plan get_plan(PlanKind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<PlanKind, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find({kind, n});
  if (it != plans.end()) return it->second;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  if (kind == PlanKind::ForwardReal) {
    std::vector<double> in(static_cast<std::size_t>(n));
    std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), flags);
  } else {
    std::vector<fftw_complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    plan = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_BACKWARD, flags);
  }
  require(plan != nullptr, ErrorKind::InvalidArgument, "FFTW planning failed");
  plans.emplace(std::pair{kind, n}, plan);
  return plan;
}

}  // namespace

void fft_forward_real(std::span<const double> x, std::span<std::complex<double>> out) {
  const int n = static_cast<int>(x.size());
  require(out.size() == x.size() / 2 + 1, ErrorKind::DimensionMismatch, "r2c output size");
  fftw_execute_dft_r2c(get_plan(PlanKind::ForwardReal, n), const_cast<double*>(x.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  const int n = static_cast<int>(in.size());
  require(out.size() == in.size(), ErrorKind::DimensionMismatch, "c2c output size");
  fftw_execute_dft(get_plan(PlanKind::InverseComplex, n),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace specmix::detail
