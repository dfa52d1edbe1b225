#pragma once

// Arbitrary-precision integers and rationals, backed by GMP.
//
// mpq_class keeps every value canonical after arithmetic: lowest terms,
// positive denominator, zero as 0/1. Values built from a raw numerator and
// denominator go through make_rational() so the same holds for them.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "dioph/errors.hpp"

namespace dioph {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt big(std::int64_t v) {
    BigInt r;
    mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
    return r;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    require(den != 0, "rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return make_rational(big(num), big(den));
}

// Always "num/den", including integers ("3/1") and zero ("0/1").
inline std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    BigInt num, den(1);
    try {
        if (slash == std::string::npos) {
            num = BigInt(s);
        } else {
            num = BigInt(s.substr(0, slash));
            den = BigInt(s.substr(slash + 1));
        }
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
    return make_rational(num, den);
}

inline bool fits_int64(const BigInt& v) { return mpz_fits_slong_p(v.get_mpz_t()) != 0; }

inline std::int64_t to_int64(const BigInt& v) {
    ensure(fits_int64(v), "integer does not fit in 64 bits: " + v.get_str());
    return mpz_get_si(v.get_mpz_t());
}

inline BigInt lcm(const BigInt& a, const BigInt& b) {
    BigInt r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline BigInt pow(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// p^e for any integer e (negative exponents give 1/p^|e|).
inline Rational rational_pow(std::uint64_t p, long e) {
    BigInt pe = pow(BigInt(static_cast<unsigned long>(p)), static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? make_rational(BigInt(1), pe) : Rational(pe);
}

}  // namespace dioph
