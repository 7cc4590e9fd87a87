#pragma once

#include <stdexcept>
#include <string>

namespace widthlab {

enum class ErrorCode {
  InvalidArgument,   // precondition or configuration violation
  Unsupported,       // combination outside what the library computes
  BandInsufficient,  // materialized spectrum or quadrature too small for the request
  ResourceBudget,    // request exceeds the configured memory budget
  NumericalFailure,  // quadrature / eigensolver / optimizer did not converge
  ParseError,        // malformed input file
  Falsified,         // a checked mathematical invariant failed
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

} // namespace widthlab
