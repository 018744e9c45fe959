#pragma once

#include <stdexcept>
#include <string>

namespace formvol {

enum class ErrorCode {
  kShape = 1,
  kDomain = 2,
  kCapacity = 3,
  kNumeric = 4,
  kInvalidCertificate = 5,
  kNotInvariant = 6,
  kInitialization = 7,
  kParse = 8,
  kIo = 9,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this exception type; the C API
// maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace formvol
