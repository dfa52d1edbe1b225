#pragma once

// SL_n(R) near the identity: matrix exponential and principal logarithm,
// and coordinates on sl_n in a Frobenius-orthonormal basis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "dioph/errors.hpp"

namespace dioph {

using RealMatrix = Eigen::MatrixXd;

inline constexpr double kDefaultDetTolerance = 1e-10;

inline bool is_group_element(const RealMatrix& x, double det_tolerance = kDefaultDetTolerance) {
    return x.rows() == x.cols() && x.rows() >= 2 && std::abs(x.determinant() - 1.0) <= det_tolerance;
}

inline void require_group_element(const RealMatrix& x, double det_tolerance = kDefaultDetTolerance) {
    require(x.rows() == x.cols() && x.rows() >= 2, "group element must be a square matrix of size >= 2");
    require(std::abs(x.determinant() - 1.0) <= det_tolerance, "group element must have determinant 1");
}

// Orthonormal basis of the trace-zero n x n matrices under <A,B> = tr(A^T B).
// Off-diagonal pairs come first (symmetric, then antisymmetric), then the
// normalized trace-zero diagonals.
inline std::vector<RealMatrix> sl_basis(int n) {
    std::vector<RealMatrix> basis;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            RealMatrix s = RealMatrix::Zero(n, n), a = RealMatrix::Zero(n, n);
            s(i, j) = s(j, i) = r2;
            a(i, j) = r2;
            a(j, i) = -r2;
            basis.push_back(s);
            basis.push_back(a);
        }
    for (int k = 1; k < n; ++k) {
        RealMatrix h = RealMatrix::Zero(n, n);
        const double c = 1.0 / std::sqrt(double(k) * (k + 1));
        for (int i = 0; i < k; ++i) h(i, i) = c;
        h(k, k) = -k * c;
        basis.push_back(h);
    }
    return basis;
}

inline int lie_dimension(int n) { return n * n - 1; }

// A trace-zero real matrix, i.e. a tangent vector at the identity.
class LieVector {
public:
    explicit LieVector(RealMatrix m) : m_(std::move(m)) {
        require(m_.rows() == m_.cols() && m_.rows() >= 2, "Lie vector must be square of size >= 2");
        require(std::abs(m_.trace()) <= 1e-12 * std::max(1.0, m_.norm()), "Lie vector must be trace-zero");
    }

    // Removes the trace component.
    static LieVector project(RealMatrix m) {
        const double t = m.trace() / double(m.rows());
        m.diagonal().array() -= t;
        m(0, 0) -= m.trace();
        return LieVector(std::move(m));
    }

    static LieVector zero(int n) { return LieVector(RealMatrix::Zero(n, n)); }

    static LieVector from_coords(int n, const Eigen::VectorXd& c) {
        auto basis = sl_basis(n);
        require(c.size() == Eigen::Index(basis.size()), "coordinate vector has wrong length");
        RealMatrix m = RealMatrix::Zero(n, n);
        for (std::size_t k = 0; k < basis.size(); ++k) m += c[Eigen::Index(k)] * basis[k];
        return project(std::move(m));
    }

    int n() const { return int(m_.rows()); }
    const RealMatrix& matrix() const { return m_; }
    double norm() const { return m_.norm(); }

    Eigen::VectorXd coords() const {
        auto basis = sl_basis(n());
        Eigen::VectorXd c(basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k) c[Eigen::Index(k)] = (m_.array() * basis[k].array()).sum();
        return c;
    }

private:
    RealMatrix m_;
};

// Scaling and squaring with a Taylor core.
inline RealMatrix matrix_exp(const RealMatrix& x) {
    const double nrm = x.lpNorm<1>();
    int squarings = 0;
    if (nrm > 0.25) squarings = int(std::ceil(std::log2(nrm / 0.25)));
    RealMatrix a = x / std::ldexp(1.0, squarings);
    const auto n = x.rows();
    RealMatrix result = RealMatrix::Identity(n, n);
    RealMatrix term = RealMatrix::Identity(n, n);
    for (int k = 1; k <= 20; ++k) {
        term = term * a / double(k);
        result += term;
        if (term.lpNorm<1>() < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

inline RealMatrix matrix_exp(const LieVector& x) { return matrix_exp(x.matrix()); }

namespace detail {

// acosh(1+u)/sqrt(u(u+2)) continued analytically through u < 0 as
// acos(1+u)/sqrt(-u(u+2)); the coefficient with log Y = f(u) (Y - tI).
inline double log_factor_2x2(double u) {
    if (std::abs(u) < 1e-3) {
        return 1 + u * (-1.0 / 3 + u * (2.0 / 15 + u * (-2.0 / 35 + u * (8.0 / 315 + u * (-8.0 / 693 + u * 16.0 / 3003)))));
    }
    if (u > 0) return std::acosh(1 + u) / std::sqrt(u * (u + 2));
    return std::acos(1 + u) / std::sqrt(-u * (u + 2));
}

inline std::optional<RealMatrix> log_2x2(const RealMatrix& y) {
    const double det = y(0, 0) * y(1, 1) - y(0, 1) * y(1, 0);
    if (!(det > 0)) return std::nullopt;
    RealMatrix z = y / std::sqrt(det);
    const double t = 0.5 * (z(0, 0) + z(1, 1));
    if (!(t > -1.0)) return std::nullopt;
    RealMatrix a = z;
    a(0, 0) -= t;
    a(1, 1) -= t;
    return a * log_factor_2x2(t - 1.0);
}

inline RealMatrix sqrtm_denman_beavers(const RealMatrix& y) {
    const auto n = y.rows();
    RealMatrix m = y, s = y;
    const RealMatrix id = RealMatrix::Identity(n, n);
    for (int it = 0; it < 60; ++it) {
        // product form: M_{k+1} = (I + (M + M^-1)/2)/2, S_{k+1} = S (I + M^-1)/2
        RealMatrix minv = m.inverse();
        s = s * (id + minv) * 0.5;
        m = 0.5 * (id + 0.5 * (m + minv));
        if ((m - id).norm() < 1e-15) break;
    }
    return s;
}

inline std::optional<RealMatrix> log_general(const RealMatrix& y) {
    const auto n = y.rows();
    Eigen::EigenSolver<RealMatrix> es(y, false);
    const double scale = std::max(1.0, y.norm());
    for (Eigen::Index i = 0; i < n; ++i) {
        auto ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) <= 1e-12 * scale && ev.real() <= 1e-12 * scale) return std::nullopt;
    }
    const RealMatrix id = RealMatrix::Identity(n, n);
    RealMatrix z = y;
    int roots = 0;
    while ((z - id).norm() > 0.25) {
        if (++roots > 60) return std::nullopt;
        z = sqrtm_denman_beavers(z);
    }
    // log Z = 2 artanh(W), W = (Z - I)(Z + I)^-1
    RealMatrix w = (z + id).partialPivLu().solve(z - id);
    RealMatrix w2 = w * w;
    RealMatrix term = w;
    RealMatrix sum = w;
    for (int k = 1; k < 100; ++k) {
        term = term * w2;
        RealMatrix add = term / double(2 * k + 1);
        sum += add;
        if (add.norm() < 1e-18) break;
    }
    RealMatrix out = 2.0 * std::ldexp(1.0, roots) * sum;
    out.diagonal().array() -= out.trace() / double(n);
    return out;
}

}  // namespace detail

// The principal logarithm, defined when Y has no eigenvalue on the closed
// negative real axis; nullopt outside that domain.
inline std::optional<LieVector> try_principal_log(const RealMatrix& y) {
    require(y.rows() == y.cols() && y.rows() >= 2, "principal_log needs a square matrix");
    auto m = y.rows() == 2 ? detail::log_2x2(y) : detail::log_general(y);
    if (!m || !m->allFinite()) return std::nullopt;
    return LieVector::project(std::move(*m));
}

inline LieVector principal_log(const RealMatrix& y) {
    auto r = try_principal_log(y);
    if (!r) throw OutOfDomain("matrix is outside the principal logarithm domain");
    return *r;
}

// x^-1 y without forming the inverse explicitly.
inline RealMatrix left_quotient(const RealMatrix& x, const RealMatrix& y) {
    require(x.rows() == y.rows() && x.cols() == y.cols(), "dimension mismatch");
    if (x.rows() == 2) {
        const double det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
        RealMatrix adj(2, 2);
        adj << x(1, 1), -x(0, 1), -x(1, 0), x(0, 0);
        return adj * y / det;
    }
    return x.partialPivLu().solve(y);
}

}  // namespace dioph
