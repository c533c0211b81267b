#include "powdist/rational.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "powdist/error.hpp"

namespace powdist {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

BigInt pow10(unsigned long k) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, k);
  return out;
}

[[noreturn]] void bad(const std::string& text) {
  throw Error(ErrorCode::Parse, "not an exact decimal or fraction: '" + text + "'");
}

}  // namespace

BigRational parse_rational(std::string_view raw) {
  const std::string text = trim(raw);
  if (text.empty()) bad(text);

  if (const auto slash = text.find('/'); slash != std::string::npos) {
    BigRational num = parse_rational(text.substr(0, slash));
    BigRational den = parse_rational(text.substr(slash + 1));
    if (den == 0) bad(text);
    BigRational out = num / den;
    out.canonicalize();
    return out;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad(text);
  long exp10 = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') bad(text);
    ++i;
    const std::string tail = text.substr(i);
    if (tail.empty()) bad(text);
    std::size_t used = 0;
    try {
      exp10 = std::stol(tail, &used);
    } catch (const std::exception&) {
      bad(text);
    }
    if (used != tail.size()) bad(text);
  }
  BigInt mant(digits, 10);
  if (negative) mant = -mant;
  const long shift = exp10 - frac_digits;
  BigRational out;
  if (shift >= 0) {
    out = BigRational(mant * pow10(static_cast<unsigned long>(shift)));
  } else {
    out = BigRational(mant, pow10(static_cast<unsigned long>(-shift)));
  }
  out.canonicalize();
  return out;
}

std::string format_rational(const BigRational& x) {
  BigInt den = x.get_den();
  unsigned long twos = 0;
  unsigned long fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return x.get_num().get_str() + "/" + x.get_den().get_str();

  const unsigned long k = std::max(twos, fives);
  const BigInt scaled = x.get_num() * pow10(k) / x.get_den();
  std::string s = BigInt(abs(scaled)).get_str();
  const bool negative = scaled < 0;
  if (k > 0) {
    if (s.size() <= k) s.insert(0, k - s.size() + 1, '0');
    s.insert(s.size() - k, ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return negative ? "-" + s : s;
}

RInterval enclose(const BigRational& x, Precision prec) {
  BigReal lo(prec);
  BigReal hi(prec);
  mpfr_set_q(lo.raw(), x.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.raw(), x.get_mpq_t(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

BigReal to_bigreal(const BigRational& x, Precision prec) {
  const BigInt& den = x.get_den();
  const auto twos = mpz_scan1(den.get_mpz_t(), 0);
  if (mpz_sizeinbase(den.get_mpz_t(), 2) == twos + 1) {
    // Dyadic: num / 2^twos is exact with as many bits as the numerator.
    BigReal out = BigReal::from_integer(x.get_num());
    return exact_ldexp(out, -static_cast<long>(twos));
  }
  BigReal out(prec);
  mpfr_set_q(out.raw(), x.get_mpq_t(), MPFR_RNDN);
  return out;
}

BigRational to_rational(const BigReal& x) {
  BigRational out;
  mpfr_get_q(out.get_mpq_t(), x.get());
  return out;
}

std::string exact_decimal(const BigReal& x) {
  return format_rational(to_rational(x));
}

RInterval pow_enclosure(const BigRational& base, const BigRational& exponent,
                        Precision prec) {
  if (base <= 0) {
    throw Error(ErrorCode::NonPositiveBase, "power of a non-positive rational");
  }
  return iv_pow(enclose(base, prec), enclose(exponent, prec), Mode::Outward,
                prec);
}

namespace {

// Largest operand size (in bits) we are willing to build for the exact check.
constexpr std::size_t kExactCheckBits = std::size_t{1} << 24;

std::size_t bits(const BigInt& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); }

// base^(u/v) == k, decided as base^u == k^v.
bool equals_integer(const BigRational& base, const BigRational& exponent,
                    const BigInt& k, Precision prec) {
  if (k <= 0) return false;
  const BigInt& u = exponent.get_num();
  const BigInt& v = exponent.get_den();
  if (!mpz_fits_ulong_p(v.get_mpz_t())) {
    throw PrecisionError(ErrorCode::Ambiguous, "exponent too large to settle exactly");
  }
  const BigInt abs_u = abs(u);
  if (!mpz_fits_ulong_p(abs_u.get_mpz_t())) {
    throw PrecisionError(ErrorCode::Ambiguous, "exponent too large to settle exactly");
  }
  const unsigned long uu = abs_u.get_ui();
  const unsigned long vv = v.get_ui();
  const std::size_t side =
      std::max(bits(base.get_num()), bits(base.get_den())) * uu;
  if (side > kExactCheckBits || bits(k) * vv > kExactCheckBits) {
    throw PrecisionError(ErrorCode::Ambiguous,
                         "power straddles an integer at " + std::to_string(prec) +
                             " bits");
  }
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), uu);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), uu);
  if (u < 0) std::swap(num, den);
  if (den != 1) return false;
  BigInt kv;
  mpz_pow_ui(kv.get_mpz_t(), k.get_mpz_t(), vv);
  return num == kv;
}

[[noreturn]] void undecided(Precision prec) {
  throw PrecisionError(ErrorCode::Ambiguous,
                       "power straddles an integer at " + std::to_string(prec) +
                           " bits");
}

}  // namespace

BigInt floor_pow(const BigRational& base, const BigRational& exponent,
                 Precision prec) {
  const RInterval e = pow_enclosure(base, exponent, prec);
  const IntCount f = iv_floor(e);
  if (f.certified) return f.value;
  // A single straddled integer k = floor(hi): the floor is k exactly when
  // the power equals k, and otherwise more precision will separate them.
  if (e.lo().floor() + 1 == f.value &&
      equals_integer(base, exponent, f.value, prec)) {
    return f.value;
  }
  undecided(prec);
}

BigInt ceil_pow(const BigRational& base, const BigRational& exponent,
                Precision prec) {
  const RInterval e = pow_enclosure(base, exponent, prec);
  const IntCount c = iv_ceil(e);
  if (c.certified) return c.value;
  if (e.hi().ceil() == c.value + 1 &&
      equals_integer(base, exponent, c.value, prec)) {
    return c.value;
  }
  undecided(prec);
}

}  // namespace powdist
