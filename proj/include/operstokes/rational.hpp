#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace operstokes {

// Exact rational. mpq_class keeps values in lowest terms with a positive
// denominator after every arithmetic operation; construct through
// make_rational / parse_rational so literal fractions are canonicalized too.
using BigRational = mpq_class;
using BigInteger = mpz_class;

inline BigRational make_rational(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    BigRational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "p", "p/q" or a finite decimal such as "-1.25".
BigRational parse_rational(std::string_view text);

// Canonical "num/den" form (denominator always printed).
std::string to_fraction_string(const BigRational& q);

inline int sign(const BigRational& q) { return sgn(q); }

}  // namespace operstokes
