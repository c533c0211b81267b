#include "powdist/precision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace powdist {

int default_max_doublings() {
  if (const char* env = std::getenv("POWDIST_MAX_DOUBLINGS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 0) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultMaxDoublings;
}

Precision bits_for_power(const BigReal& exponent, const RInterval& base,
                         Precision guard) {
  const double e = std::max(0.0, exponent.to_double(Round::Up));
  const double lb = std::max(0.0, std::log2(base.hi().to_double(Round::Up)));
  const double bits = std::ceil(e * lb);
  return std::max<Precision>(kDefaultPrecision,
                             static_cast<Precision>(bits) + guard);
}

}  // namespace powdist
