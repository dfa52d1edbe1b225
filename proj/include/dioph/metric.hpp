#pragma once

// Left-invariant distance on SL_n(R) induced by the Frobenius inner product
// on sl_n.
//
// log mode:      rho(x, y) = || log(x^-1 y) ||_F
// refined(k):    the shortest path x = z_0, z_1, ..., z_k = y whose segments
//                are one-parameter subgroups, length sum ||log(z_{i-1}^-1 z_i)||_F,
//                minimized numerically over the intermediate points.
//
// refined(1) is the log mode. refined(k) never exceeds the log mode, and for
// k with a proper divisor m the search starts from the refined(m) optimum,
// so refined values do not increase along divisor chains (1, 2, 4, ...).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dioph/lie.hpp"

namespace dioph {

struct MetricSpec {
    enum class Mode { log, refined };
    Mode mode = Mode::log;
    int segments = 1;

    static MetricSpec log_mode() { return {}; }
    static MetricSpec refined(int k) {
        require(k >= 1, "refined metric needs at least one segment");
        return {Mode::refined, k};
    }

    bool is_log() const { return mode == Mode::log || segments == 1; }

    std::string to_string() const {
        return mode == Mode::log ? std::string("log") : "refined(" + std::to_string(segments) + ")";
    }

    friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

inline constexpr double kDefaultRMax = 0.9;

inline std::optional<double> try_log_distance(const RealMatrix& x, const RealMatrix& y) {
    auto l = try_principal_log(left_quotient(x, y));
    if (!l) return std::nullopt;
    return l->norm();
}

namespace detail {

struct RefinedPath {
    double length = 0;
    std::vector<RealMatrix> points;  // z_0 .. z_k
};

inline double path_length(const std::vector<RealMatrix>& z) {
    double total = 0;
    for (std::size_t i = 1; i < z.size(); ++i) {
        auto d = try_log_distance(z[i - 1], z[i]);
        if (!d) return std::numeric_limits<double>::infinity();
        total += *d;
    }
    return total;
}

// Intermediate points are moved as z_i = w_i exp(U_i); BFGS over the stacked
// U_i with central-difference gradients and Armijo backtracking.
inline RefinedPath optimize_path(std::vector<RealMatrix> seed) {
    const int n = int(seed.front().rows());
    const int d = lie_dimension(n);
    const int inner = int(seed.size()) - 2;
    RefinedPath best{path_length(seed), seed};
    if (inner <= 0) return best;
    const auto basis = sl_basis(n);
    const int dim = inner * d;

    auto build = [&](const Eigen::VectorXd& u) {
        std::vector<RealMatrix> z = seed;
        for (int i = 0; i < inner; ++i) {
            RealMatrix x = RealMatrix::Zero(n, n);
            for (int k = 0; k < d; ++k) x += u[i * d + k] * basis[std::size_t(k)];
            z[std::size_t(i + 1)] = seed[std::size_t(i + 1)] * matrix_exp(x);
        }
        return z;
    };
    auto f = [&](const Eigen::VectorXd& u) { return path_length(build(u)); };
    auto grad = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd g(dim);
        const double h = 1e-7;
        for (int k = 0; k < dim; ++k) {
            Eigen::VectorXd up = u, um = u;
            up[k] += h;
            um[k] -= h;
            g[k] = (f(up) - f(um)) / (2 * h);
        }
        return g;
    };

    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
    double fu = best.length;
    Eigen::VectorXd g = grad(u);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
    for (int it = 0; it < 200 && g.norm() > 1e-10; ++it) {
        Eigen::VectorXd p = -hinv * g;
        if (p.dot(g) >= 0) {
            hinv.setIdentity();
            p = -g;
        }
        double step = 1.0, fn = fu;
        Eigen::VectorXd un;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            un = u + step * p;
            fn = f(un);
            if (fn <= fu + 1e-4 * step * p.dot(g)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        Eigen::VectorXd gn = grad(un);
        Eigen::VectorXd s = un - u, y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-16) {
            const double rho = 1.0 / sy;
            Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
            hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        const double gain = fu - fn;
        u = un;
        fu = fn;
        g = gn;
        if (gain < 1e-15 * std::max(1.0, fu)) break;
    }
    if (fu < best.length) best = {fu, build(u)};
    return best;
}

// Splits every segment of a path into `parts` equal one-parameter pieces;
// the length is unchanged.
inline std::vector<RealMatrix> subdivide(const std::vector<RealMatrix>& z, int parts) {
    std::vector<RealMatrix> out{z.front()};
    for (std::size_t i = 1; i < z.size(); ++i) {
        const RealMatrix step = matrix_exp(principal_log(left_quotient(z[i - 1], z[i])).matrix() / double(parts));
        RealMatrix cur = z[i - 1];
        for (int j = 1; j < parts; ++j) {
            cur = cur * step;
            out.push_back(cur);
        }
        out.push_back(z[i]);
    }
    return out;
}

inline RefinedPath refined_path(const RealMatrix& x, const RealMatrix& y, int k) {
    if (k == 1) return {path_length({x, y}), {x, y}};
    int m = 1;
    for (int c = k / 2; c >= 2; --c)
        if (k % c == 0) {
            m = c;
            break;
        }
    RefinedPath coarse = refined_path(x, y, m);
    RefinedPath fine = optimize_path(subdivide(coarse.points, k / m));
    return fine.length < coarse.length ? fine : coarse;
}

}  // namespace detail

inline double distance(const RealMatrix& x, const RealMatrix& y, const MetricSpec& metric = {}) {
    if (metric.is_log()) {
        auto d = try_log_distance(x, y);
        if (!d) throw OutOfDomain("x^-1 y is outside the principal logarithm domain");
        return *d;
    }
    if (!try_log_distance(x, y)) throw OutOfDomain("x^-1 y is outside the principal logarithm domain");
    // Left invariance: work from the identity.
    const RealMatrix q = left_quotient(x, y);
    const auto n = x.rows();
    return detail::refined_path(RealMatrix::Identity(n, n), q, metric.segments).length;
}

// Fast 2x2 log-mode distance from x (given as x^-1, row-major) to g.
inline std::optional<double> log_distance_2x2(const std::array<double, 4>& x_inv, const std::array<double, 4>& g) {
    const double y00 = x_inv[0] * g[0] + x_inv[1] * g[2];
    const double y01 = x_inv[0] * g[1] + x_inv[1] * g[3];
    const double y10 = x_inv[2] * g[0] + x_inv[3] * g[2];
    const double y11 = x_inv[2] * g[1] + x_inv[3] * g[3];
    const double det = y00 * y11 - y01 * y10;
    if (!(det > 0)) return std::nullopt;
    const double s = 1.0 / std::sqrt(det);
    const double t = 0.5 * (y00 + y11) * s;
    if (!(t > -1.0)) return std::nullopt;
    const double a = y00 * s - t, b = y01 * s, c = y10 * s, dd = y11 * s - t;
    return std::sqrt(a * a + b * b + c * c + dd * dd) * detail::log_factor_2x2(t - 1.0);
}

}  // namespace dioph
