#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specmix {

enum class ErrorKind {
  NonDyadicLength,
  LengthBelowFilterSupport,
  ZeroPowerBin,
  UnstableModel,
  IndexOutOfRange,
  InvalidSparsity,
  DegenerateVariance,
  DomainError,
  SingularCovariance,
  EmptyRandomEffectSet,
  NonPSDCovariance,
  NonPSDScenario,
  SizeTooSmall,
  InvalidArgument,
  DimensionMismatch,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so front-ends can map
// it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace specmix
