#pragma once

#include <string>
#include <string_view>

#include <gmpxx.h>

#include "powdist/bigreal.hpp"
#include "powdist/interval.hpp"

namespace powdist {

using BigRational = mpq_class;

// Parses "3", "-0.25", "1.5e-3" or "p/q" exactly. Throws Error(Parse).
BigRational parse_rational(std::string_view text);

// Exact decimal text when the denominator is of the form 2^a 5^b, otherwise
// "p/q". parse_rational(format_rational(x)) == x always.
std::string format_rational(const BigRational& x);

// Outward enclosure of an exact rational at the given precision (a point
// interval whenever the value is representable).
RInterval enclose(const BigRational& x, Precision prec);

// The value as a BigReal: exact when x is dyadic, otherwise rounded to
// nearest at `prec` bits.
BigReal to_bigreal(const BigRational& x, Precision prec);

BigRational to_rational(const BigReal& x);

// Exact decimal expansion of a binary floating-point value.
std::string exact_decimal(const BigReal& x);

// Outward enclosure of base^exponent for exact rationals, base > 0.
RInterval pow_enclosure(const BigRational& base, const BigRational& exponent,
                        Precision prec);

// Certified floor / ceil of base^exponent. When the enclosure straddles an
// integer k, the equality base^exponent == k is settled exactly; otherwise
// PrecisionError(Ambiguous) is raised for the caller to escalate.
BigInt floor_pow(const BigRational& base, const BigRational& exponent,
                 Precision prec);
BigInt ceil_pow(const BigRational& base, const BigRational& exponent,
                Precision prec);

}  // namespace powdist
