#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/rational.hpp"

namespace dioph {

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Deterministic Miller-Rabin; the first twelve prime bases certify every
// 64-bit input.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    static constexpr std::uint64_t bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : bases) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (auto a : bases) {
        std::uint64_t x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> sieve(limit + 1, true);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) sieve[j] = false;
    }
    return out;
}

// The finite prime set S, or the flag S = all primes.
class PrimeSet {
public:
    static PrimeSet of(std::vector<std::uint64_t> primes) {
        require(!primes.empty(), "prime set must be non-empty");
        std::sort(primes.begin(), primes.end());
        for (std::size_t i = 0; i < primes.size(); ++i) {
            require(is_prime(primes[i]), std::to_string(primes[i]) + " is not prime");
            require(i == 0 || primes[i] != primes[i - 1], "duplicate prime " + std::to_string(primes[i]));
        }
        PrimeSet s;
        s.primes_ = std::move(primes);
        return s;
    }

    static PrimeSet all() {
        PrimeSet s;
        s.all_ = true;
        return s;
    }

    bool all_primes() const { return all_; }

    // Only meaningful for a finite set.
    const std::vector<std::uint64_t>& primes() const {
        ensure(!all_, "primes() on the all-primes set; use resolve(h)");
        return primes_;
    }

    bool contains(std::uint64_t p) const {
        return all_ ? is_prime(p) : std::binary_search(primes_.begin(), primes_.end(), p);
    }

    // Primes of S that can carry a positive level within height h.
    std::vector<std::uint64_t> resolve(std::uint64_t h) const {
        if (all_) return primes_up_to(h);
        std::vector<std::uint64_t> out;
        for (auto p : primes_)
            if (p <= h) out.push_back(p);
        return out;
    }

    std::string to_string() const {
        if (all_) return "all";
        std::string s;
        for (std::size_t i = 0; i < primes_.size(); ++i) s += (i ? "," : "") + std::to_string(primes_[i]);
        return s;
    }

    friend bool operator==(const PrimeSet&, const PrimeSet&) = default;

private:
    PrimeSet() = default;
    std::vector<std::uint64_t> primes_;
    bool all_ = false;
};

// Exponent of p in |n|, n != 0.
inline long valuation(const BigInt& n, std::uint64_t p) {
    if (n == 0) throw OutOfDomain("valuation of zero");
    BigInt q = n;
    BigInt pp(static_cast<unsigned long>(p));
    long v = 0;
    while (mpz_divisible_p(q.get_mpz_t(), pp.get_mpz_t())) {
        mpz_divexact(q.get_mpz_t(), q.get_mpz_t(), pp.get_mpz_t());
        ++v;
    }
    return v;
}

namespace detail {

inline BigInt pollard_brent(const BigInt& n) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1;; ++c) {
        BigInt y = 2, x, g = 1, q = 1, ys, t;
        unsigned long r = 1, m = 64;
        auto f = [&](const BigInt& v) {
            BigInt out = v * v + c;
            mpz_mod(out.get_mpz_t(), out.get_mpz_t(), n.get_mpz_t());
            return out;
        };
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = f(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    t = abs(x - y);
                    q = q * t;
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                t = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_into(BigInt n, std::map<BigInt, long>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40) > 0) {
        out[n] += 1;
        return;
    }
    BigInt d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace detail

// Prime factorization of |n|, n != 0. Trial division handles the small
// primes; Pollard-Brent splits whatever remains.
inline std::map<BigInt, long> factorize(const BigInt& n) {
    if (n == 0) throw OutOfDomain("factorize(0)");
    std::map<BigInt, long> out;
    BigInt m = abs(n);
    for (unsigned long p = 2; p < 1000 && m > 1; p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            out[BigInt(p)] += 1;
        }
    }
    detail::factor_into(m, out);
    return out;
}

}  // namespace dioph
