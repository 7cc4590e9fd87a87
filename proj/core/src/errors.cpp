#include "widthlab/errors.hpp"

namespace widthlab {

const char* to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument: return "invalid-argument";
  case ErrorCode::Unsupported: return "unsupported";
  case ErrorCode::BandInsufficient: return "band-insufficient";
  case ErrorCode::ResourceBudget: return "resource-budget";
  case ErrorCode::NumericalFailure: return "numerical-failure";
  case ErrorCode::ParseError: return "parse-error";
  case ErrorCode::Falsified: return "falsified";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace widthlab
