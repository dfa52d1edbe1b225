#pragma once

// Haar volume of metric balls in SL_n(R):
//     m(B(x, delta)) = integral over ||X||_F <= delta in sl_n of J(X) dX,
// independent of x by left invariance.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "dioph/haar.hpp"
#include "dioph/metric.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

struct VolumeEstimate {
    double delta = 0;
    double estimate = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

struct ArchVolumeOptions {
    int n = 2;
    MetricSpec metric{};
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double r_max = kDefaultRMax;
};

inline constexpr std::uint64_t kSamplesPerShard = 1u << 15;

// Monte Carlo over the d-ball with the radial CDF variable stratified inside
// each shard. Shard i draws from seed + i, so the estimate is a function of
// (samples, seed) only; shard results are combined by pairwise summation in
// shard order.
//
// For refined metrics the sampling ball is enlarged by 25%: refined balls
// contain the log-mode ball of the same radius, and points with log distance
// at most delta are accepted without running the path optimizer.
inline VolumeEstimate ball_volume_arch(double delta, const ArchVolumeOptions& opt) {
    require(delta > 0, "ball radius must be positive");
    if (delta > opt.r_max) throw OutOfDomain("ball radius exceeds r_max");
    require(opt.samples >= 2, "need at least two samples");
    require(opt.n >= 2, "group dimension must be at least 2");
    const int n = opt.n;
    const int d = lie_dimension(n);
    const bool refined = !opt.metric.is_log();
    const double outer = refined ? 1.25 * delta : delta;
    const auto basis = sl_basis(n);
    const std::uint64_t shards = (opt.samples + kSamplesPerShard - 1) / kSamplesPerShard;
    std::vector<double> sums(shards), sums2(shards);
    std::atomic<bool> outer_hit{false};

    parallel_for(shards, opt.workers, [&](std::size_t shard) {
        const std::uint64_t begin = shard * kSamplesPerShard;
        const std::uint64_t m = std::min<std::uint64_t>(kSamplesPerShard, opt.samples - begin);
        std::mt19937_64 rng(opt.seed + shard);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> c(std::size_t(d), 0.0);
        double s = 0, s2 = 0;
        for (std::uint64_t j = 0; j < m; ++j) {
            const double t = (double(j) + unif(rng)) / double(m);
            const double r = outer * std::pow(t, 1.0 / d);
            double norm2 = 0;
            for (auto& v : c) {
                v = gauss(rng);
                norm2 += v * v;
            }
            const double scale = r / std::sqrt(norm2);
            for (auto& v : c) v *= scale;
            double w;
            if (n == 2) {
                // basis order: symmetric, antisymmetric, diagonal
                const double f = detail::sinhc_of_square(0.5 * (c[2] * c[2] + c[0] * c[0] - c[1] * c[1]));
                w = f * f;
            } else {
                RealMatrix x = RealMatrix::Zero(n, n);
                for (int k = 0; k < d; ++k) x += c[std::size_t(k)] * basis[std::size_t(k)];
                w = exp_jacobian(x);
            }
            if (refined && r > delta) {
                RealMatrix x = RealMatrix::Zero(n, n);
                for (int k = 0; k < d; ++k) x += c[std::size_t(k)] * basis[std::size_t(k)];
                const double dist = distance(RealMatrix::Identity(n, n), matrix_exp(x), opt.metric);
                if (dist > delta) w = 0;
                else if (r > 0.98 * outer) outer_hit = true;
            }
            s += w;
            s2 += w * w;
        }
        sums[shard] = s;
        sums2[shard] = s2;
    });
    ensure(!outer_hit, "refined ball reaches the sampling boundary; enlarge the sampling radius");

    const double total = double(opt.samples);
    const double mean = pairwise_sum(sums) / total;
    const double mean2 = pairwise_sum(sums2) / total;
    const double vol = unit_ball_volume(d) * std::pow(outer, d);
    const double var = std::max(0.0, mean2 - mean * mean) * total / (total - 1);
    return {delta, vol * mean, vol * std::sqrt(var / total), opt.samples, opt.seed};
}

struct RegularityResult {
    double ratio_up = 1;
    double ratio_down = 1;
    double d_fit = 0;
};

// Ratios m(O_{delta+eps})/m(O_delta), m(O_{delta-eps})/m(O_delta) and the
// least D with ratio_up <= 1 + D eps/delta and ratio_down >= 1 - D eps/delta.
inline RegularityResult regularity_check(double delta, double eps, const std::function<double(double)>& volume,
                                         double r_max = kDefaultRMax) {
    require(delta > 0 && eps >= 0, "regularity check needs delta > 0 and eps >= 0");
    if (eps > delta / 2) throw OutOfDomain("degenerate grid: eps must not exceed delta/2");
    if (delta > r_max / 2) throw OutOfDomain("delta must not exceed r_max/2");
    if (eps == 0) return {};
    const double base = volume(delta);
    require(base > 0, "volume must be positive");
    RegularityResult r;
    r.ratio_up = volume(delta + eps) / base;
    r.ratio_down = volume(delta - eps) / base;
    r.d_fit = std::max({0.0, (r.ratio_up - 1) * delta / eps, (1 - r.ratio_down) * delta / eps});
    return r;
}

struct RegularityGridResult {
    std::vector<RegularityResult> cells;
    double d_fit = 0;     // one D for the whole grid
    bool holds = false;   // both inequalities hold at every cell with d_fit
};

inline RegularityGridResult regularity_over_grid(const std::vector<std::pair<double, double>>& grid,
                                                 const std::function<double(double)>& volume,
                                                 double r_max = kDefaultRMax) {
    RegularityGridResult out;
    for (auto [delta, eps] : grid) {
        out.cells.push_back(regularity_check(delta, eps, volume, r_max));
        out.d_fit = std::max(out.d_fit, out.cells.back().d_fit);
    }
    out.holds = std::isfinite(out.d_fit);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [delta, eps] = grid[i];
        const auto& c = out.cells[i];
        const double slack = 1e-12;
        out.holds = out.holds && c.ratio_up <= 1 + out.d_fit * eps / delta + slack &&
                    c.ratio_down >= 1 - out.d_fit * eps / delta - slack;
    }
    return out;
}

}  // namespace dioph
