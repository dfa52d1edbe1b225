#pragma once

// Hand-rolled random generators and independent oracles shared by the tests.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "dioph/lie.hpp"
#include "dioph/qmatrix.hpp"

namespace dioph::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo = 0, double hi = 1) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Denominators drawn as products of small prime powers so lcms stay
// interesting; numerators arbitrary.
inline Rational random_rational(Rng& rng) {
    static const std::int64_t primes[] = {2, 3, 5, 7, 11, 13};
    std::int64_t den = 1;
    const int factors = int(uniform_int(rng, 0, 3));
    for (int i = 0; i < factors; ++i) den *= primes[uniform_int(rng, 0, 5)];
    if (uniform_int(rng, 0, 9) == 0) den *= uniform_int(rng, 1, 1000);
    return make_rational(uniform_int(rng, -50, 50), den);
}

inline QMatrix random_qmatrix(Rng& rng, std::size_t n) {
    QMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = random_rational(rng);
    return m;
}

// Trace-zero X with ||X||_F = r (direction uniform on the sphere).
inline RealMatrix random_sl(Rng& rng, int n, double r) {
    std::normal_distribution<double> g(0.0, 1.0);
    RealMatrix x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = g(rng);
    x -= (x.trace() / n) * RealMatrix::Identity(n, n);
    return x * (r / x.norm());
}

// Uniform in the Frobenius ball of radius r.
inline RealMatrix random_sl_in_ball(Rng& rng, int n, double r) {
    const int d = n * n - 1;
    return random_sl(rng, n, r * std::pow(uniform_real(rng), 1.0 / d));
}

inline RealMatrix random_group_element(Rng& rng, int n, double r) { return matrix_exp(random_sl_in_ball(rng, n, r)); }

inline std::int64_t gcd_all(const std::vector<std::int64_t>& v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x);
    return g;
}

// Integer determinant by cofactor expansion (tiny n only).
inline std::int64_t int_det(const std::vector<std::int64_t>& m, int n) {
    if (n == 1) return m[0];
    std::int64_t s = 0;
    for (int j = 0; j < n; ++j) {
        std::vector<std::int64_t> minor;
        for (int r = 1; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (c != j) minor.push_back(m[std::size_t(r * n + c)]);
        const std::int64_t t = m[std::size_t(j)] * int_det(minor, n - 1);
        s += (j % 2 == 0) ? t : -t;
    }
    return s;
}

}  // namespace dioph::testing
