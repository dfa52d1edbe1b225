#pragma once

// p-adic valuations and norms of rational matrices, and the adelic height
//     H(M) = prod_p max(1, ||M||_p).

#include <cstdint>
#include <map>
#include <set>

#include "dioph/primes.hpp"
#include "dioph/qmatrix.hpp"

namespace dioph {

// v with q = p^v * (p-adic unit).
inline long padic_valuation(const Rational& q, std::uint64_t p) {
    if (q == 0) throw OutOfDomain("p-adic valuation of zero");
    require(is_prime(p), std::to_string(p) + " is not prime");
    return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

// Exponent m with ||M||_p = p^m; `zero` marks the zero matrix.
struct NormExponent {
    bool zero = true;
    long exponent = 0;
};

inline NormExponent padic_norm_exponent(const QMatrix& m, std::uint64_t p) {
    NormExponent out;
    for (const auto& v : m.entries()) {
        if (v == 0) continue;
        long e = -padic_valuation(v, p);
        if (out.zero || e > out.exponent) out.exponent = e;
        out.zero = false;
    }
    return out;
}

// max over entries of |entry|_p; zero entries contribute 0, so the zero
// matrix has norm 0.
inline Rational padic_norm(const QMatrix& m, std::uint64_t p) {
    auto e = padic_norm_exponent(m, p);
    return e.zero ? Rational(0) : rational_pow(p, e.exponent);
}

inline BigInt denominator_lcm(const QMatrix& m) {
    BigInt l = 1;
    for (const auto& v : m.entries()) l = lcm(l, v.get_den());
    return l;
}

// Product formula over the finitely many primes that divide some entry
// denominator; every other prime contributes max(1, ||M||_p) = 1.
inline BigInt height(const QMatrix& m) {
    std::set<BigInt> primes;
    for (const auto& v : m.entries()) {
        if (v.get_den() == 1) continue;
        for (const auto& [p, e] : factorize(v.get_den())) primes.insert(p);
    }
    BigInt h = 1;
    for (const auto& p : primes) {
        auto e = padic_norm_exponent(m, mpz_get_ui(p.get_mpz_t()));
        if (!e.zero && e.exponent > 0) h *= pow(p, static_cast<unsigned long>(e.exponent));
    }
    return h;
}

// True when every entry denominator factors over S.
inline bool denominators_over(const QMatrix& m, const PrimeSet& s) {
    for (const auto& v : m.entries()) {
        BigInt d = v.get_den();
        if (d == 1) continue;
        if (s.all_primes()) continue;
        for (auto p : s.primes()) {
            while (mpz_divisible_ui_p(d.get_mpz_t(), p)) mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), p);
        }
        if (d != 1) return false;
    }
    return true;
}

// Membership in SL_n(Z[S^-1]).
inline bool is_member(const QMatrix& m, const PrimeSet& s) {
    return denominators_over(m, s) && m.det() == 1;
}

}  // namespace dioph
