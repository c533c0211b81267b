#pragma once

#include <compare>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace powdist {

using Precision = mpfr_prec_t;
using BigInt = mpz_class;

inline constexpr Precision kDefaultPrecision = 128;

// Rounding direction requested for a single operation. The direction is a
// property of the operation, never of the stored value.
enum class Round { Down, Up, Nearest };

mpfr_rnd_t to_mpfr(Round r) noexcept;
Round opposite(Round r) noexcept;

// Arbitrary-precision binary floating-point value (RAII wrapper around an
// mpfr_t). Every arithmetic free function below takes the precision of the
// result and the rounding direction explicitly; results are correctly
// rounded, so Round::Down never exceeds and Round::Up never undershoots the
// exact value.
class BigReal {
 public:
  BigReal();
  explicit BigReal(Precision prec);
  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  // Exact conversions (precision chosen large enough to hold the value).
  static BigReal from_long(long v);
  static BigReal from_integer(const BigInt& z);
  static BigReal from_integer(const BigInt& z, Precision prec, Round r);
  static BigReal from_double(double v);

  // Parses decimal ("3.25", "-1e-5") or hexadecimal float ("0x1.8p+1")
  // text. Throws Error(Parse) on malformed input.
  static BigReal parse(std::string_view text, Precision prec, Round r);

  // Same value at another precision.
  BigReal rounded(Precision prec, Round r) const;

  Precision precision() const noexcept;
  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_ptr raw() noexcept { return value_; }

  int sign() const noexcept;
  bool is_zero() const noexcept;
  bool is_integer() const noexcept;
  bool is_finite() const noexcept;
  long exponent2() const noexcept;  // x = m * 2^e with 1/2 <= |m| < 1

  double to_double(Round r = Round::Nearest) const;
  BigInt floor() const;
  BigInt ceil() const;

  // Exact hexadecimal float text, round-trips through parse().
  std::string to_hex() const;
  // Scientific decimal text with `digits` significant digits.
  std::string to_decimal(int digits, Round r = Round::Nearest) const;

  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);
  friend bool operator==(const BigReal& a, const BigReal& b);

 private:
  mpfr_t value_;
};

BigReal add(const BigReal& a, const BigReal& b, Round r, Precision prec);
BigReal sub(const BigReal& a, const BigReal& b, Round r, Precision prec);
BigReal mul(const BigReal& a, const BigReal& b, Round r, Precision prec);
BigReal div(const BigReal& a, const BigReal& b, Round r, Precision prec);
BigReal add(const BigReal& a, const BigInt& z, Round r, Precision prec);
BigReal sub(const BigReal& a, const BigInt& z, Round r, Precision prec);
BigReal pow(const BigReal& x, const BigReal& y, Round r, Precision prec);
BigReal exp(const BigReal& x, Round r, Precision prec);
BigReal log(const BigReal& x, Round r, Precision prec);
BigReal sqrt(const BigReal& x, Round r, Precision prec);
BigReal neg(const BigReal& x);
BigReal abs(const BigReal& x);
const BigReal& min(const BigReal& a, const BigReal& b);
const BigReal& max(const BigReal& a, const BigReal& b);

// Exact operations: the result precision is sized so that no rounding
// happens. Used where sequence terms must be reproduced bit-for-bit.
BigReal exact_add(const BigReal& a, const BigReal& b);
BigReal exact_sub(const BigReal& a, const BigReal& b);
BigReal exact_mul(const BigReal& a, const BigReal& b);
BigReal exact_mul(const BigReal& a, long k);
BigReal exact_ldexp(const BigReal& a, long e);

}  // namespace powdist
