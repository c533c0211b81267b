#include "powdist/error.hpp"

namespace powdist {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveBase: return "NonPositiveBase";
    case ErrorCode::InwardCollapse: return "InwardCollapse";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::GapConditionSuspect: return "GapConditionSuspect";
    case ErrorCode::InsertionInfeasible: return "InsertionInfeasible";
    case ErrorCode::NoValidIndex: return "NoValidIndex";
    case ErrorCode::NoValidStart: return "NoValidStart";
    case ErrorCode::CountShortfall: return "CountShortfall";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& what,
                     std::optional<std::size_t> index) {
  std::string out = to_string(code);
  if (index) out += " at index " + std::to_string(*index);
  out += ": ";
  out += what;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& what,
             std::optional<std::size_t> index)
    : std::runtime_error(decorate(code, what, index)),
      code_(code),
      index_(index) {}

}  // namespace powdist
