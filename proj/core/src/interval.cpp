#include "powdist/interval.hpp"

#include <array>
#include <string>
#include <utility>

#include "powdist/error.hpp"

namespace powdist {

RInterval::RInterval() = default;

RInterval::RInterval(BigReal lo, BigReal hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (!lo_.is_finite() || !hi_.is_finite()) {
    throw Error(ErrorCode::InvalidArgument, "interval endpoint is not finite");
  }
  if (hi_ < lo_) {
    throw Error(ErrorCode::InvalidArgument,
                "interval endpoints out of order: lo=" + lo_.to_decimal(20) +
                    " hi=" + hi_.to_decimal(20));
  }
}

RInterval RInterval::point(BigReal v) {
  BigReal copy = v;
  return RInterval(std::move(copy), std::move(v));
}

RInterval RInterval::from_integer(const BigInt& z) {
  return point(BigReal::from_integer(z));
}

RInterval RInterval::parse(std::string_view text, Precision prec) {
  return RInterval(BigReal::parse(text, prec, Round::Down),
                   BigReal::parse(text, prec, Round::Up));
}

BigReal RInterval::width(Precision prec) const {
  return powdist::sub(hi_, lo_, Round::Up, prec);
}

BigReal RInterval::midpoint(Precision prec) const {
  BigReal sum = powdist::add(lo_, hi_, Round::Nearest, prec + 1);
  return exact_ldexp(sum, -1).rounded(prec, Round::Nearest);
}

Precision RInterval::precision() const {
  return std::max(lo_.precision(), hi_.precision());
}

RInterval add(const RInterval& a, const RInterval& b, Precision prec) {
  return {add(a.lo(), b.lo(), Round::Down, prec),
          add(a.hi(), b.hi(), Round::Up, prec)};
}

RInterval sub(const RInterval& a, const RInterval& b, Precision prec) {
  return {sub(a.lo(), b.hi(), Round::Down, prec),
          sub(a.hi(), b.lo(), Round::Up, prec)};
}

RInterval add(const RInterval& a, const BigInt& z, Precision prec) {
  return {add(a.lo(), z, Round::Down, prec), add(a.hi(), z, Round::Up, prec)};
}

RInterval neg(const RInterval& a) { return {neg(a.hi()), neg(a.lo())}; }

namespace {

template <typename Fn>
RInterval corners(const RInterval& a, const RInterval& b, Precision prec,
                  Fn fn) {
  const std::array<std::pair<const BigReal*, const BigReal*>, 4> cs{{
      {&a.lo(), &b.lo()},
      {&a.lo(), &b.hi()},
      {&a.hi(), &b.lo()},
      {&a.hi(), &b.hi()},
  }};
  BigReal lo = fn(*cs[0].first, *cs[0].second, Round::Down, prec);
  BigReal hi = fn(*cs[0].first, *cs[0].second, Round::Up, prec);
  for (std::size_t i = 1; i < cs.size(); ++i) {
    BigReal l = fn(*cs[i].first, *cs[i].second, Round::Down, prec);
    BigReal h = fn(*cs[i].first, *cs[i].second, Round::Up, prec);
    if (l < lo) lo = std::move(l);
    if (hi < h) hi = std::move(h);
  }
  return {std::move(lo), std::move(hi)};
}

BigReal mul_fn(const BigReal& x, const BigReal& y, Round r, Precision p) {
  return mul(x, y, r, p);
}
BigReal div_fn(const BigReal& x, const BigReal& y, Round r, Precision p) {
  return div(x, y, r, p);
}
BigReal pow_fn(const BigReal& x, const BigReal& y, Round r, Precision p) {
  return pow(x, y, r, p);
}

const BigReal& half() {
  static const BigReal v = BigReal::parse("0.5", 8, Round::Nearest);
  return v;
}

// ||y|| for 0 <= y <= 2, rounded in direction r.
BigReal dist_small(const BigReal& y, Round r, Precision prec) {
  static const BigReal one = BigReal::from_long(1);
  static const BigReal three_halves = BigReal::parse("1.5", 8, Round::Nearest);
  static const BigReal two = BigReal::from_long(2);
  if (y <= half()) return y.rounded(prec, r);
  if (y <= three_halves) return abs(sub(y, one, r, prec));
  return sub(two, y, r, prec);
}

}  // namespace

RInterval mul(const RInterval& a, const RInterval& b, Precision prec) {
  return corners(a, b, prec, mul_fn);
}

RInterval div(const RInterval& a, const RInterval& b, Precision prec) {
  if (b.lo().sign() <= 0 && b.hi().sign() >= 0) {
    throw Error(ErrorCode::InvalidArgument, "interval division by zero");
  }
  return corners(a, b, prec, div_fn);
}

RInterval exp(const RInterval& a, Precision prec) {
  return {exp(a.lo(), Round::Down, prec), exp(a.hi(), Round::Up, prec)};
}

RInterval log(const RInterval& a, Precision prec) {
  if (a.lo().sign() <= 0) {
    throw Error(ErrorCode::NonPositiveBase, "log of non-positive interval");
  }
  return {log(a.lo(), Round::Down, prec), log(a.hi(), Round::Up, prec)};
}

RInterval hull(const RInterval& a, const RInterval& b) {
  return {min(a.lo(), b.lo()), max(a.hi(), b.hi())};
}

RInterval iv_pow(const RInterval& base, const RInterval& exponent, Mode mode,
                 Precision prec) {
  if (base.lo().sign() <= 0) {
    throw Error(ErrorCode::NonPositiveBase,
                "iv_pow base must be positive, lo=" + base.lo().to_decimal(20));
  }
  if (mode == Mode::Outward) return corners(base, exponent, prec, pow_fn);

  // Inward: the exact min is at most every upward-rounded corner value, and
  // the exact max at least every downward-rounded corner value.
  const std::array<std::pair<const BigReal*, const BigReal*>, 4> cs{{
      {&base.lo(), &exponent.lo()},
      {&base.lo(), &exponent.hi()},
      {&base.hi(), &exponent.lo()},
      {&base.hi(), &exponent.hi()},
  }};
  BigReal lo = pow(*cs[0].first, *cs[0].second, Round::Up, prec);
  BigReal hi = pow(*cs[0].first, *cs[0].second, Round::Down, prec);
  for (std::size_t i = 1; i < cs.size(); ++i) {
    BigReal l = pow(*cs[i].first, *cs[i].second, Round::Up, prec);
    BigReal h = pow(*cs[i].first, *cs[i].second, Round::Down, prec);
    if (l < lo) lo = std::move(l);
    if (hi < h) hi = std::move(h);
  }
  if (hi < lo) {
    throw PrecisionError(ErrorCode::InwardCollapse,
                         "inward power endpoints crossed at " +
                             std::to_string(prec) + " bits");
  }
  return {std::move(lo), std::move(hi)};
}

IntCount iv_floor(const RInterval& x) {
  BigInt a = x.lo().floor();
  BigInt b = x.hi().floor();
  if (a == b) return IntCount::exact(std::move(a));
  return IntCount::ambiguous(std::move(b));
}

IntCount iv_ceil(const RInterval& x) {
  BigInt a = x.lo().ceil();
  BigInt b = x.hi().ceil();
  if (a == b) return IntCount::exact(std::move(a));
  return IntCount::ambiguous(std::move(a));
}

RInterval dist_nearest_int(const RInterval& x, Precision prec) {
  static const BigReal one = BigReal::from_long(1);
  BigReal zero(prec);
  BigReal upper_half = half().rounded(prec, Round::Nearest);
  if (sub(x.hi(), x.lo(), Round::Down, prec) >= one) {
    return {zero, upper_half};
  }
  const BigInt n = x.lo().floor();
  const BigReal ylo = sub(x.lo(), n, Round::Down, prec);
  const BigReal yhi = sub(x.hi(), n, Round::Up, prec);

  bool hits_integer = false;
  bool hits_half = false;
  for (long k = 0; k <= 2; ++k) {
    const BigReal kk = BigReal::from_long(k);
    if (ylo <= kk && kk <= yhi) hits_integer = true;
    const BigReal kh = add(kk, half(), Round::Nearest, 64);
    if (ylo <= kh && kh <= yhi) hits_half = true;
  }
  BigReal lo = hits_integer ? zero
                            : min(dist_small(ylo, Round::Down, prec),
                                  dist_small(yhi, Round::Down, prec));
  BigReal hi = hits_half ? upper_half
                         : max(dist_small(ylo, Round::Up, prec),
                               dist_small(yhi, Round::Up, prec));
  if (lo.sign() < 0) lo = zero;
  if (upper_half < hi) hi = upper_half;
  return {std::move(lo), std::move(hi)};
}

FracPart frac_part(const RInterval& x, Precision prec) {
  const BigInt a = x.lo().floor();
  const BigInt b = x.hi().floor();
  if (a != b) return FracPart{std::nullopt, b};
  return FracPart{RInterval(sub(x.lo(), a, Round::Down, prec),
                            sub(x.hi(), a, Round::Up, prec)),
                  a};
}

std::optional<bool> certified_less(const RInterval& a, const RInterval& b) {
  if (a.hi() < b.lo()) return true;
  if (a.lo() >= b.hi()) return false;
  return std::nullopt;
}

std::optional<bool> certified_leq(const RInterval& a, const RInterval& b) {
  if (a.hi() <= b.lo()) return true;
  if (a.lo() > b.hi()) return false;
  return std::nullopt;
}

namespace {

struct DigitString {
  std::string digits;
  long exp10 = 0;  // value = 0.digits * 10^exp10
};

DigitString digits_of(const BigReal& v, int n, Round r) {
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(n),
                           v.get(), to_mpfr(r));
  DigitString out{raw, static_cast<long>(e)};
  mpfr_free_str(raw);
  return out;
}

std::string place_point(const std::string& digits, long exp10) {
  if (digits.empty()) return "0";
  if (exp10 > static_cast<long>(digits.size()) || exp10 < -6) {
    std::string out = digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    return out + "e" + std::to_string(exp10 - 1);
  }
  if (exp10 <= 0) return "0." + std::string(static_cast<std::size_t>(-exp10), '0') + digits;
  if (static_cast<std::size_t>(exp10) == digits.size()) return digits;
  return digits.substr(0, static_cast<std::size_t>(exp10)) + "." +
         digits.substr(static_cast<std::size_t>(exp10));
}

}  // namespace

CertifiedDecimal certified_decimal(const RInterval& x, int max_digits) {
  const bool negative = x.hi().sign() < 0;
  if (!negative && x.lo().sign() <= 0) {
    if (x.lo().is_zero() && x.hi().is_zero()) return {"0", max_digits};
    return {"?", 0};
  }
  // Work on |x| so that truncation is toward zero.
  const BigReal& small = negative ? x.hi() : x.lo();
  const BigReal& big = negative ? x.lo() : x.hi();
  const int n = max_digits + 2;
  const DigitString a = digits_of(abs(small), n, Round::Down);
  const DigitString b = digits_of(abs(big), n, Round::Up);
  if (a.exp10 != b.exp10) return {"?", 0};
  std::size_t k = 0;
  while (k < a.digits.size() && k < b.digits.size() &&
         k < static_cast<std::size_t>(max_digits) && a.digits[k] == b.digits[k]) {
    ++k;
  }
  if (k == 0) return {"?", 0};
  std::string text = place_point(a.digits.substr(0, k), a.exp10);
  if (negative) text = "-" + text;
  return {text, static_cast<int>(k)};
}

}  // namespace powdist
