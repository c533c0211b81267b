#include "powdist/bigreal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "powdist/error.hpp"

namespace powdist {

mpfr_rnd_t to_mpfr(Round r) noexcept {
  switch (r) {
    case Round::Down: return MPFR_RNDD;
    case Round::Up: return MPFR_RNDU;
    case Round::Nearest: return MPFR_RNDN;
  }
  return MPFR_RNDN;
}

Round opposite(Round r) noexcept {
  switch (r) {
    case Round::Down: return Round::Up;
    case Round::Up: return Round::Down;
    case Round::Nearest: return Round::Nearest;
  }
  return Round::Nearest;
}

BigReal::BigReal() : BigReal(kDefaultPrecision) {}

BigReal::BigReal(Precision prec) {
  mpfr_init2(value_, std::max<Precision>(prec, MPFR_PREC_MIN));
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(value_); }

BigReal BigReal::from_long(long v) {
  BigReal out(64);
  mpfr_set_si(out.value_, v, MPFR_RNDN);
  return out;
}

BigReal BigReal::from_integer(const BigInt& z) {
  const auto bits = static_cast<Precision>(mpz_sizeinbase(z.get_mpz_t(), 2));
  BigReal out(std::max<Precision>(bits, 2));
  mpfr_set_z(out.value_, z.get_mpz_t(), MPFR_RNDN);
  return out;
}

BigReal BigReal::from_integer(const BigInt& z, Precision prec, Round r) {
  BigReal out(prec);
  mpfr_set_z(out.value_, z.get_mpz_t(), to_mpfr(r));
  return out;
}

BigReal BigReal::from_double(double v) {
  BigReal out(53);
  mpfr_set_d(out.value_, v, MPFR_RNDN);
  return out;
}

BigReal BigReal::parse(std::string_view text, Precision prec, Round r) {
  std::string buf(text);
  // Trim surrounding whitespace; anything else left over is an error.
  const auto first = buf.find_first_not_of(" \t\r\n");
  const auto last = buf.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) {
    throw Error(ErrorCode::Parse, "empty numeric field");
  }
  buf = buf.substr(first, last - first + 1);
  BigReal out(prec);
  char* end = nullptr;
  mpfr_strtofr(out.value_, buf.c_str(), &end, 0, to_mpfr(r));
  if (end == buf.c_str() || *end != '\0' || !mpfr_number_p(out.value_)) {
    throw Error(ErrorCode::Parse, "not a finite number: '" + buf + "'");
  }
  return out;
}

BigReal BigReal::rounded(Precision prec, Round r) const {
  BigReal out(prec);
  mpfr_set(out.value_, value_, to_mpfr(r));
  return out;
}

Precision BigReal::precision() const noexcept { return mpfr_get_prec(value_); }
int BigReal::sign() const noexcept { return mpfr_sgn(value_); }
bool BigReal::is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
bool BigReal::is_integer() const noexcept {
  return mpfr_integer_p(value_) != 0;
}
bool BigReal::is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
long BigReal::exponent2() const noexcept {
  return is_zero() ? 0 : static_cast<long>(mpfr_get_exp(value_));
}

double BigReal::to_double(Round r) const {
  return mpfr_get_d(value_, to_mpfr(r));
}

BigInt BigReal::floor() const {
  BigInt z;
  mpfr_get_z(z.get_mpz_t(), value_, MPFR_RNDD);
  return z;
}

BigInt BigReal::ceil() const {
  BigInt z;
  mpfr_get_z(z.get_mpz_t(), value_, MPFR_RNDU);
  return z;
}

std::string BigReal::to_hex() const {
  char* raw = nullptr;
  mpfr_asprintf(&raw, "%Ra", value_);
  std::string out(raw);
  mpfr_free_str(raw);
  return out;
}

std::string BigReal::to_decimal(int digits, Round r) const {
  if (is_zero()) return "0";
  digits = std::max(digits, 1);
  mpfr_exp_t e10 = 0;
  char* raw = mpfr_get_str(nullptr, &e10, 10, static_cast<std::size_t>(digits),
                           value_, to_mpfr(r));
  std::string mant(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (!mant.empty() && mant.front() == '-') {
    sign = "-";
    mant.erase(mant.begin());
  }
  // mpfr gives 0.d1d2... * 10^e10; print as d1.d2...e(e10-1).
  std::string out = sign + mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  const long exp10 = static_cast<long>(e10) - 1;
  if (exp10 != 0) out += "e" + std::to_string(exp10);
  return out;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) {
    return std::partial_ordering::unordered;
  }
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

bool operator==(const BigReal& a, const BigReal& b) {
  return mpfr_equal_p(a.value_, b.value_) != 0;
}

namespace {

template <typename Fn>
BigReal binary(const BigReal& a, const BigReal& b, Round r, Precision prec,
               Fn fn) {
  BigReal out(prec);
  fn(out.raw(), a.get(), b.get(), to_mpfr(r));
  return out;
}

// Position of the least significant bit that can be set in x.
long lsb_exponent(const BigReal& x) {
  return x.exponent2() - static_cast<long>(x.precision());
}

}  // namespace

BigReal add(const BigReal& a, const BigReal& b, Round r, Precision prec) {
  return binary(a, b, r, prec, mpfr_add);
}
BigReal sub(const BigReal& a, const BigReal& b, Round r, Precision prec) {
  return binary(a, b, r, prec, mpfr_sub);
}
BigReal mul(const BigReal& a, const BigReal& b, Round r, Precision prec) {
  return binary(a, b, r, prec, mpfr_mul);
}
BigReal div(const BigReal& a, const BigReal& b, Round r, Precision prec) {
  return binary(a, b, r, prec, mpfr_div);
}
BigReal pow(const BigReal& x, const BigReal& y, Round r, Precision prec) {
  return binary(x, y, r, prec, mpfr_pow);
}

BigReal add(const BigReal& a, const BigInt& z, Round r, Precision prec) {
  BigReal out(prec);
  mpfr_add_z(out.raw(), a.get(), z.get_mpz_t(), to_mpfr(r));
  return out;
}

BigReal sub(const BigReal& a, const BigInt& z, Round r, Precision prec) {
  BigReal out(prec);
  mpfr_sub_z(out.raw(), a.get(), z.get_mpz_t(), to_mpfr(r));
  return out;
}

BigReal exp(const BigReal& x, Round r, Precision prec) {
  BigReal out(prec);
  mpfr_exp(out.raw(), x.get(), to_mpfr(r));
  return out;
}

BigReal log(const BigReal& x, Round r, Precision prec) {
  BigReal out(prec);
  mpfr_log(out.raw(), x.get(), to_mpfr(r));
  return out;
}

BigReal sqrt(const BigReal& x, Round r, Precision prec) {
  BigReal out(prec);
  mpfr_sqrt(out.raw(), x.get(), to_mpfr(r));
  return out;
}

BigReal neg(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_neg(out.raw(), x.get(), MPFR_RNDN);
  return out;
}

BigReal abs(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_abs(out.raw(), x.get(), MPFR_RNDN);
  return out;
}

const BigReal& min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }
const BigReal& max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }

BigReal exact_add(const BigReal& a, const BigReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const long top = std::max(a.exponent2(), b.exponent2()) + 1;
  const long bottom = std::min(lsb_exponent(a), lsb_exponent(b));
  BigReal out(static_cast<Precision>(top - bottom + 1));
  const int ternary = mpfr_add(out.raw(), a.get(), b.get(), MPFR_RNDN);
  if (ternary != 0) {
    throw Error(ErrorCode::InvalidArgument, "exact_add lost bits");
  }
  return out;
}

BigReal exact_sub(const BigReal& a, const BigReal& b) {
  return exact_add(a, neg(b));
}

BigReal exact_mul(const BigReal& a, const BigReal& b) {
  BigReal out(a.precision() + b.precision());
  const int ternary = mpfr_mul(out.raw(), a.get(), b.get(), MPFR_RNDN);
  if (ternary != 0) {
    throw Error(ErrorCode::InvalidArgument, "exact_mul lost bits");
  }
  return out;
}

BigReal exact_mul(const BigReal& a, long k) {
  return exact_mul(a, BigReal::from_long(k));
}

BigReal exact_ldexp(const BigReal& a, long e) {
  BigReal out(a.precision());
  mpfr_mul_2si(out.raw(), a.get(), e, MPFR_RNDN);
  return out;
}

}  // namespace powdist
