#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace powdist {

enum class ErrorCode {
  NonPositiveBase,
  InwardCollapse,
  Ambiguous,
  PrecisionExhausted,
  GapConditionSuspect,
  InsertionInfeasible,
  NoValidIndex,
  NoValidStart,
  CountShortfall,
  InsufficientDepth,
  Parse,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

// Base exception for everything the library raises. `index` names the
// sequence index or level at which the failure was detected, if any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

// Raised when the current working precision cannot decide a comparison.
// Callers running under an escalation policy retry at higher precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace powdist
