#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "powdist/bigreal.hpp"

namespace powdist {

// OUTWARD results are certified supersets of the exact set; INWARD results
// are certified subsets.
enum class Mode { Outward, Inward };

// Closed interval [lo, hi] with lo <= hi.
class RInterval {
 public:
  RInterval();
  RInterval(BigReal lo, BigReal hi);

  static RInterval point(BigReal v);
  static RInterval from_integer(const BigInt& z);
  // Outward enclosure of the number written in `text` (decimal or hex).
  static RInterval parse(std::string_view text, Precision prec);

  const BigReal& lo() const noexcept { return lo_; }
  const BigReal& hi() const noexcept { return hi_; }

  bool is_point() const { return lo_ == hi_; }
  bool contains(const BigReal& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const RInterval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  bool overlaps(const RInterval& other) const {
    return !(hi_ < other.lo_ || other.hi_ < lo_);
  }

  BigReal width(Precision prec) const;      // rounded up
  BigReal midpoint(Precision prec) const;   // nearest
  Precision precision() const;              // max endpoint precision

 private:
  BigReal lo_;
  BigReal hi_;
};

// Outward interval arithmetic. Each endpoint is rounded away from the
// interior, so the exact result of the operation on any members of the
// operands lies in the returned interval.
RInterval add(const RInterval& a, const RInterval& b, Precision prec);
RInterval sub(const RInterval& a, const RInterval& b, Precision prec);
RInterval mul(const RInterval& a, const RInterval& b, Precision prec);
RInterval div(const RInterval& a, const RInterval& b, Precision prec);
RInterval add(const RInterval& a, const BigInt& z, Precision prec);
RInterval neg(const RInterval& a);
RInterval exp(const RInterval& a, Precision prec);
RInterval log(const RInterval& a, Precision prec);
RInterval hull(const RInterval& a, const RInterval& b);

// x^y for x > 0. OUTWARD encloses {x^y : x in base, y in exponent};
// INWARD is contained in it. Extremes sit at the corners of the box
// because x^y is monotone in each argument separately.
// Throws Error(NonPositiveBase) and PrecisionError(InwardCollapse).
RInterval iv_pow(const RInterval& base, const RInterval& exponent, Mode mode,
                 Precision prec);

// Either a certified integer, or AMBIGUOUS with the straddled candidate.
struct IntCount {
  bool certified = false;
  BigInt value;

  static IntCount exact(BigInt v) { return {true, std::move(v)}; }
  static IntCount ambiguous(BigInt candidate) {
    return {false, std::move(candidate)};
  }
};

IntCount iv_floor(const RInterval& x);
IntCount iv_ceil(const RInterval& x);

// Outward enclosure of {||t|| : t in x}, always within [0, 1/2].
RInterval dist_nearest_int(const RInterval& x, Precision prec);

// Fractional part of an interval that does not straddle an integer, or the
// WRAPPED marker (value empty) together with the straddled integer.
struct FracPart {
  std::optional<RInterval> value;
  BigInt straddled;

  bool wrapped() const { return !value.has_value(); }
};

FracPart frac_part(const RInterval& x, Precision prec);

// Three-valued comparisons: nullopt when the enclosures overlap too much to
// decide at the current precision.
std::optional<bool> certified_less(const RInterval& a, const RInterval& b);
std::optional<bool> certified_leq(const RInterval& a, const RInterval& b);

// Decimal text whose every digit is shared by all points of the interval
// (truncation semantics), with the number of such significant digits.
struct CertifiedDecimal {
  std::string text;
  int digits = 0;
};

CertifiedDecimal certified_decimal(const RInterval& x, int max_digits);

}  // namespace powdist
