#pragma once

// Density of the left-invariant volume on SL_n(R) in exponential
// coordinates:  J(X) = |det((1 - e^{-ad X}) / ad X)|.
//
// The eigenvalues of ad X are the differences mu = l_i - l_j of eigenvalues
// of X; pairing mu with -mu gives
//     J(X) = prod_{i<j} (sinh(mu_ij / 2) / (mu_ij / 2))^2.

#include <complex>

#include "dioph/lie.hpp"

namespace dioph {

namespace detail {

// sinh(s)/s as a function of s^2 (real for real X even when s is imaginary).
inline double sinhc_of_square(double s2) {
    if (std::abs(s2) < 1e-4) {
        return 1 + s2 / 6 * (1 + s2 / 20 * (1 + s2 / 42 * (1 + s2 / 72)));
    }
    if (s2 > 0) {
        const double s = std::sqrt(s2);
        return std::sinh(s) / s;
    }
    const double s = std::sqrt(-s2);
    return std::sin(s) / s;
}

inline std::complex<double> sinhc(std::complex<double> z) {
    if (std::abs(z) < 1e-4) {
        const auto z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0);
    }
    return std::sinh(z) / z;
}

}  // namespace detail

inline double exp_jacobian(const RealMatrix& x) {
    const auto n = x.rows();
    if (n == 2) {
        // eigenvalues +-s with s^2 = -det X; mu = 2s
        const double s2 = -(x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0));
        const double f = detail::sinhc_of_square(s2);
        return f * f;
    }
    Eigen::EigenSolver<RealMatrix> es(x, false);
    const auto ev = es.eigenvalues();
    std::complex<double> prod = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto f = detail::sinhc((ev[i] - ev[j]) / 2.0);
            prod *= f * f;
        }
    return std::abs(prod);
}

inline double exp_jacobian(const LieVector& x) { return exp_jacobian(x.matrix()); }

}  // namespace dioph
