#include "formvol/errors.hpp"

namespace formvol {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kCapacity: return "capacity error";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kInvalidCertificate: return "invalid certificate";
    case ErrorCode::kNotInvariant: return "norm is not orthogonally invariant";
    case ErrorCode::kInitialization: return "initialization error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace formvol
