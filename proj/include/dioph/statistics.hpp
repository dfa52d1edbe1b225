#pragma once

// Counts against the main term v_arch * v_S / V: predictions, discrepancy,
// covolume fit, error-shape regression and the explicit constants of the
// variable-domain counting bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dioph/errors.hpp"
#include "dioph/rational.hpp"

namespace dioph {

inline double predicted_count(double v_arch, const Rational& v_s, double covolume) {
    require(covolume > 0, "covolume must be positive");
    return v_arch * v_s.get_d() / covolume;
}

inline double discrepancy(std::uint64_t count, double v_h, double nu_omega) {
    require(v_h > 0, "height-ball volume must be positive");
    return std::abs(double(count) / v_h - nu_omega);
}

struct ScanRow {
    std::string x_id;
    double delta = 0;
    std::uint64_t h = 1;
    std::uint64_t n_count = 0;
    double v_arch = 0;
    double v_arch_stderr = 0;
    Rational v_s{1};
    double v_used = 0;  // covolume
    double prediction = 0;
    double ratio = 0;
    double discrepancy = 0;
};

// Fills prediction, ratio and discrepancy from the counts, volumes and V,
// with nu = v_arch / V.
inline void attach_prediction(ScanRow& r, double covolume) {
    r.v_used = covolume;
    r.prediction = predicted_count(r.v_arch, r.v_s, covolume);
    ensure(r.prediction > 0, "prediction must be positive");
    r.ratio = double(r.n_count) / r.prediction;
    r.discrepancy = discrepancy(r.n_count, r.v_s.get_d(), r.v_arch / covolume);
}

struct CovolumeFit {
    double v_hat = 0;
    std::vector<double> residuals;  // N / prediction - 1 at v_hat
};

// Minimizes sum (N - w/V)^2 / (w/V) with w = v_arch v_S; the stationary
// point is V^2 = sum w / sum (N^2 / w).
inline CovolumeFit covolume_fit(const std::vector<ScanRow>& rows) {
    require(rows.size() >= 3, "covolume fit needs at least 3 rows");
    std::set<std::uint64_t> hs;
    double sw = 0, sn = 0;
    for (const auto& r : rows) {
        hs.insert(r.h);
        const double w = r.v_arch * r.v_s.get_d();
        require(w > 0, "rows need positive volumes");
        sw += w;
        sn += double(r.n_count) * double(r.n_count) / w;
    }
    require(hs.size() >= 2, "covolume fit needs rows at distinct h");
    require(sn > 0, "degenerate rows: all counts are zero");
    CovolumeFit out;
    out.v_hat = std::sqrt(sw / sn);
    for (const auto& r : rows) out.residuals.push_back(double(r.n_count) / predicted_count(r.v_arch, r.v_s, out.v_hat) - 1);
    return out;
}

inline double kappa_s(double q, double d, double a) {
    require(q >= 2, "q must be at least 2");
    require(d > 0 && a > 0, "d and a must be positive");
    return q * d / a;
}

struct ConstantsInput {
    double m = 0;        // min of the density on [0, r0]
    double m_prime = 0;  // its Lipschitz constant
    double d_reg = 0;    // regularity constant, > 2
    double mf_w = 1;     // measure of the compact open subgroup
    double covolume = 1;
    double eps0 = 0;     // injectivity radius
    double r0 = 0;
    double d = 0;        // dimension
};

struct ConstantsReport {
    double a = 0;
    double c1 = 0;
    double c2_prime = 0;
    double c2 = 0;
    double e = 1;
    double interval_lo = 0;  // c1 E^{1/d}
    double interval_hi = 0;  // c2, open end
    bool interval_empty = false;
};

inline ConstantsReport theorem_constants(const ConstantsInput& in, double e) {
    require(in.m > 0 && in.m_prime > 0 && in.mf_w > 0 && in.covolume > 0 && in.eps0 > 0 && in.r0 > 0 && in.d > 0,
            "constants input must be strictly positive");
    require(in.d_reg > 2, "regularity constant D must exceed 2");
    require(e > 0 && e <= 1, "E must lie in (0, 1]");
    const double d = in.d;
    ConstantsReport r;
    r.a = 6 * std::pow(in.m, -1 / (d + 1)) * std::pow(in.d_reg, d / (d + 1)) * std::pow(in.mf_w, -1 / (d + 1)) *
          std::pow(in.covolume, -d / (d + 1));
    r.c1 = std::pow(2.0, (d + 1) / d) * in.d_reg * std::pow(in.m, -1 / d) * std::pow(in.mf_w, -1 / d) *
           std::pow(in.covolume, 1 / d);
    r.c2_prime = std::pow(2.0, -(d + 1)) * in.m * in.d_reg * in.mf_w * in.covolume * std::pow(in.eps0, d + 1);
    r.c2 = std::min(r.c2_prime, in.r0 / 2);
    r.e = e;
    r.interval_lo = r.c1 * std::pow(e, 1 / d);
    r.interval_hi = r.c2;
    r.interval_empty = !(r.interval_lo < r.interval_hi);
    return r;
}

struct ErrorShapeFit {
    double slope_delta = 0;
    double slope_delta_ci = 0;  // half-width, about 95%
    double slope_e = 0;         // against log v_S
    double slope_e_ci = 0;
    double intercept = 0;
    double expected_delta_slope = 0;  // -d/(d+1)
    std::size_t rows_used = 0;
    bool delta_varies = false;
    bool h_varies = false;
};

// Regresses log|N/prediction - 1| on log delta and log v_S jointly; a
// regressor that does not vary is dropped and its slope reported as NaN.
inline ErrorShapeFit error_shape_fit(const std::vector<ScanRow>& rows, int d) {
    require(d > 0, "dimension must be positive");
    std::vector<double> y, ld, lv;
    for (const auto& r : rows) {
        const double rel = std::abs(double(r.n_count) / r.prediction - 1);
        if (!(rel > 0) || !std::isfinite(rel)) continue;
        y.push_back(std::log(rel));
        ld.push_back(std::log(r.delta));
        lv.push_back(std::log(r.v_s.get_d()));
    }
    require(!y.empty(), "degenerate rows: every count equals its prediction");
    auto varies = [](const std::vector<double>& v) {
        for (double x : v)
            if (std::abs(x - v.front()) > 1e-12) return true;
        return false;
    };
    ErrorShapeFit out;
    out.expected_delta_slope = -double(d) / (d + 1);
    out.rows_used = y.size();
    out.delta_varies = varies(ld);
    out.h_varies = varies(lv);
    const int cols = 1 + int(out.delta_varies) + int(out.h_varies);
    require(int(y.size()) > cols, "too few usable rows for the error-shape fit");

    Eigen::MatrixXd a(Eigen::Index(y.size()), cols);
    Eigen::VectorXd b(Eigen::Index(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        int c = 0;
        a(Eigen::Index(i), c++) = 1;
        if (out.delta_varies) a(Eigen::Index(i), c++) = ld[i];
        if (out.h_varies) a(Eigen::Index(i), c++) = lv[i];
        b(Eigen::Index(i)) = y[i];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd resid = b - a * coef;
    const double dof = double(y.size()) - cols;
    const double sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0;
    const Eigen::MatrixXd cov = sigma2 * (a.transpose() * a).inverse();
    const double z = 1.96;
    int c = 0;
    out.intercept = coef(c++);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.slope_delta = out.slope_delta_ci = out.slope_e = out.slope_e_ci = nan;
    if (out.delta_varies) {
        out.slope_delta = coef(c);
        out.slope_delta_ci = z * std::sqrt(std::max(0.0, cov(c, c)));
        ++c;
    }
    if (out.h_varies) {
        out.slope_e = coef(c);
        out.slope_e_ci = z * std::sqrt(std::max(0.0, cov(c, c)));
    }
    return out;
}

}  // namespace dioph
