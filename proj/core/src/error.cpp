#include "specmix/error.hpp"

namespace specmix {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonDyadicLength: return "NonDyadicLength";
    case ErrorKind::LengthBelowFilterSupport: return "LengthBelowFilterSupport";
    case ErrorKind::ZeroPowerBin: return "ZeroPowerBin";
    case ErrorKind::UnstableModel: return "UnstableModel";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidSparsity: return "InvalidSparsity";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::EmptyRandomEffectSet: return "EmptyRandomEffectSet";
    case ErrorKind::NonPSDCovariance: return "NonPSDCovariance";
    case ErrorKind::NonPSDScenario: return "NonPSDScenario";
    case ErrorKind::SizeTooSmall: return "SizeTooSmall";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace specmix
