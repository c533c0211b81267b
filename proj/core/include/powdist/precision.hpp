#pragma once

#include <string>
#include <utility>

#include "powdist/bigreal.hpp"
#include "powdist/error.hpp"
#include "powdist/interval.hpp"

namespace powdist {

inline constexpr Precision kGuardBits = 96;
inline constexpr int kDefaultMaxDoublings = 8;

// Start precision (0 = derive from the problem) and how many times a run
// may double it after an undecidable comparison.
struct PrecisionPolicy {
  Precision initial = 0;
  int max_doublings = kDefaultMaxDoublings;
};

// POWDIST_MAX_DOUBLINGS overrides the default cap when set.
int default_max_doublings();

// ceil(exponent * log2(base_hi)) + guard bits, at least kDefaultPrecision.
Precision bits_for_power(const BigReal& exponent, const RInterval& base,
                         Precision guard = kGuardBits);

// Runs fn(prec), doubling prec on PrecisionError up to the cap. Throws
// Error(PrecisionExhausted) carrying the last failure's index.
template <typename Fn>
auto with_escalation(Precision start, int max_doublings, Fn&& fn)
    -> decltype(fn(start)) {
  Precision prec = start;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn(prec);
    } catch (const PrecisionError& e) {
      if (attempt >= max_doublings) {
        throw Error(ErrorCode::PrecisionExhausted,
                    std::string("still undecided at ") + std::to_string(prec) +
                        " bits: " + e.what(),
                    e.index());
      }
      prec *= 2;
    }
  }
}

}  // namespace powdist
