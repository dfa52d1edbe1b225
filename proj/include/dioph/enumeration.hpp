#pragma once

// Exhaustive enumeration of Gamma_S = SL_n(Z[S^-1]) inside a bounded region
// of SL_n(R), stratified by exact denominator.
//
// A point of exact denominator D = prod p^{k_p} is gamma = M / D with M
// integral, det M = D^n, and M not divisible by any p | D. Its height is D.
// For n = 2 the top row (a, b) is scanned over the region's entry bounds and
// a d - b c = D^2 is solved by extended gcd: the solutions form the line
//     (c, d) = (c0, d0) + t (a/g, b/g),   g = gcd(a, b),
// which is clipped to the bounds of the bottom row.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <tuple>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dioph/group_point.hpp"
#include "dioph/metric.hpp"
#include "dioph/parallel.hpp"

namespace dioph {

struct MetricBall {
    RealMatrix center;
    double radius = 0;
    MetricSpec metric{};
};

struct EntryBox {
    Rational bound;  // |gamma_ij| <= bound
};

class Region {
public:
    static Region ball(RealMatrix center, double radius, MetricSpec metric = {}, double r_max = kDefaultRMax) {
        require_group_element(center);
        require(radius > 0, "ball radius must be positive");
        if (radius > r_max) throw OutOfDomain("ball radius exceeds r_max");
        return Region(MetricBall{std::move(center), radius, metric});
    }

    static Region box(Rational bound) {
        require(bound >= 1, "entry box bound must be at least 1");
        return Region(EntryBox{std::move(bound)});
    }

    bool is_ball() const { return std::holds_alternative<MetricBall>(kind_); }
    const MetricBall& as_ball() const { return std::get<MetricBall>(kind_); }
    const EntryBox& as_box() const { return std::get<EntryBox>(kind_); }

    // Dimension for balls; boxes fit any dimension.
    std::optional<int> dimension() const {
        if (is_ball()) return int(as_ball().center.rows());
        return std::nullopt;
    }

private:
    explicit Region(std::variant<MetricBall, EntryBox> k) : kind_(std::move(k)) {}
    std::variant<MetricBall, EntryBox> kind_;
};

// Real interval for each entry of gamma over the region. For a ball,
// gamma = x Y with ||Y - I||_op <= e^delta - 1 (since ||log Y||_op <=
// ||log Y||_F <= delta), so |gamma_ij - x_ij| <= ||row_i(x)||_2 (e^delta - 1).
// A refined path of length L also has ||Y - I||_op <= e^L - 1.
struct EntryInterval {
    double lo = 0;
    double hi = 0;
};

inline std::vector<EntryInterval> ball_entry_bounds(const MetricBall& ball) {
    const auto n = ball.center.rows();
    const double eta = std::expm1(ball.radius) * (1 + 1e-12) + 1e-12;
    std::vector<EntryInterval> out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = ball.center.row(i).norm();
        for (Eigen::Index j = 0; j < n; ++j) out.push_back({ball.center(i, j) - rho * eta, ball.center(i, j) + rho * eta});
    }
    return out;
}

// Exponents k_p > 0 of an exact denominator, ascending in p.
using LevelIndex = std::vector<std::pair<std::uint64_t, int>>;

inline std::uint64_t level_denominator(const LevelIndex& level) {
    std::uint64_t d = 1;
    for (auto [p, k] : level)
        for (int i = 0; i < k; ++i) {
            if (d > std::numeric_limits<std::uint64_t>::max() / p) throw ResourceLimit("level denominator overflows");
            d *= p;
        }
    return d;
}

// All levels over S with D <= h, in increasing D.
inline std::vector<LevelIndex> levels_up_to(const PrimeSet& s, std::uint64_t h) {
    const auto primes = s.resolve(h);
    std::vector<std::pair<std::uint64_t, LevelIndex>> acc;
    LevelIndex cur;
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t d) {
        if (i == primes.size()) {
            acc.emplace_back(d, cur);
            return;
        }
        rec(i + 1, d);
        const auto p = primes[i];
        std::uint64_t dd = d;
        for (int k = 1; dd <= h / p; ++k) {
            dd *= p;
            cur.emplace_back(p, k);
            rec(i + 1, dd);
            cur.pop_back();
        }
    };
    rec(0, 1);
    std::sort(acc.begin(), acc.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<LevelIndex> out;
    for (auto& [d, l] : acc) out.push_back(std::move(l));
    return out;
}

struct EnumeratedPoint {
    int n = 2;
    std::vector<std::int64_t> scaled;  // D * gamma, row-major
    std::int64_t denominator = 1;      // exact denominator D = height
    double distance = std::numeric_limits<double>::quiet_NaN();  // to the ball center

    QMatrix matrix() const { return QMatrix::from_scaled(std::size_t(n), scaled, denominator); }
    GroupPoint group_point(const PrimeSet& s) const { return GroupPoint(matrix(), s); }

    RealMatrix real() const {
        RealMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = double(scaled[std::size_t(i * n + j)]) / double(denominator);
        return m;
    }

    friend bool operator<(const EnumeratedPoint& x, const EnumeratedPoint& y) {
        if (x.denominator != y.denominator) return x.denominator < y.denominator;
        return x.scaled < y.scaled;
    }
    friend bool operator==(const EnumeratedPoint& x, const EnumeratedPoint& y) {
        return x.denominator == y.denominator && x.scaled == y.scaled;
    }
};

struct EnumerationStats {
    std::uint64_t top_rows = 0;     // leading rows scanned
    std::uint64_t solutions = 0;    // integral solutions inside the entry bounds
    std::uint64_t primitive = 0;    // of those, with exact denominator D
    std::uint64_t prefiltered = 0;  // rejected by the Frobenius prefilter
    std::uint64_t accepted = 0;

    EnumerationStats& operator+=(const EnumerationStats& o) {
        top_rows += o.top_rows;
        solutions += o.solutions;
        primitive += o.primitive;
        prefiltered += o.prefiltered;
        accepted += o.accepted;
        return *this;
    }
};

struct EnumerationOptions {
    int n = 2;
    unsigned workers = 1;
    bool collect_points = true;
    // Resource guard on the number of leading-row candidates per level.
    double candidate_cap = 5e9;
    // Stricter guard for the naive n >= 3 search.
    double naive_cap = 2e8;
};

namespace detail {

struct ExtGcd {
    std::int64_t g, u, v;  // a u + b v = g >= 0
};

inline ExtGcd ext_gcd(std::int64_t a, std::int64_t b) {
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

using i128 = __int128;

inline i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

// Narrows [tlo, thi] to the t with lo <= base + t*step <= hi.
inline void clip(i128 base, i128 step, std::int64_t lo, std::int64_t hi, i128& tlo, i128& thi) {
    if (step == 0) {
        if (base < lo || base > hi) {
            tlo = 1;
            thi = 0;
        }
        return;
    }
    i128 a, b;
    if (step > 0) {
        a = ceil_div(i128(lo) - base, step);
        b = floor_div(i128(hi) - base, step);
    } else {
        a = ceil_div(i128(hi) - base, step);
        b = floor_div(i128(lo) - base, step);
    }
    tlo = std::max(tlo, a);
    thi = std::min(thi, b);
}

struct IntBounds {
    std::vector<std::int64_t> lo, hi;  // per entry of M = D gamma
    double width(std::size_t k) const { return double(hi[k]) - double(lo[k]) + 1; }
    bool empty() const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (lo[k] > hi[k]) return true;
        return false;
    }
};

inline IntBounds integer_bounds(const Region& region, int n, std::int64_t den) {
    IntBounds b;
    const std::size_t nn = std::size_t(n * n);
    b.lo.resize(nn);
    b.hi.resize(nn);
    if (region.is_ball()) {
        const auto iv = ball_entry_bounds(region.as_ball());
        for (std::size_t k = 0; k < nn; ++k) {
            const double lo = std::ceil(double(den) * iv[k].lo - 1e-9);
            const double hi = std::floor(double(den) * iv[k].hi + 1e-9);
            if (std::abs(lo) > 4e18 || std::abs(hi) > 4e18) throw ResourceLimit("entry bounds overflow");
            b.lo[k] = std::int64_t(lo);
            b.hi[k] = std::int64_t(hi);
        }
    } else {
        Rational scaled = region.as_box().bound * Rational(big(den));
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        if (!fits_int64(fl)) throw ResourceLimit("entry bounds overflow");
        const std::int64_t B = to_int64(fl);
        std::fill(b.lo.begin(), b.lo.end(), -B);
        std::fill(b.hi.begin(), b.hi.end(), B);
    }
    return b;
}

// Region membership after the integral constraints hold.
class Membership {
public:
    Membership(const Region& region, int n) : region_(region), n_(n) {
        if (region.is_ball()) {
            const auto& b = region.as_ball();
            require(b.center.rows() == n, "ball center dimension does not match n");
            x_inv_ = b.center.inverse();
            if (n == 2) x_inv2_ = {x_inv_(0, 0), x_inv_(0, 1), x_inv_(1, 0), x_inv_(1, 1)};
            prefilter_ = std::sqrt(double(n)) * std::expm1(b.radius) * (1 + 1e-9) + 1e-12;
        }
    }

    // nullopt: rejected; NaN distance for boxes.
    std::optional<double> test(const std::int64_t* m, std::int64_t den, EnumerationStats& st) const {
        if (!region_.is_ball()) return std::numeric_limits<double>::quiet_NaN();
        const auto& b = region_.as_ball();
        RealMatrix g(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) g(i, j) = double(m[i * n_ + j]) / double(den);
        RealMatrix y = x_inv_ * g;
        if ((y - RealMatrix::Identity(n_, n_)).norm() > prefilter_) {
            ++st.prefiltered;
            return std::nullopt;
        }
        std::optional<double> dist;
        if (n_ == 2) {
            dist = log_distance_2x2(x_inv2_, {g(0, 0), g(0, 1), g(1, 0), g(1, 1)});
        } else {
            auto l = try_principal_log(y);
            if (l) dist = l->norm();
        }
        if (!dist) return std::nullopt;
        if (*dist <= b.radius) return dist;
        if (b.metric.is_log()) return std::nullopt;
        const double refined = distance(b.center, g, b.metric);
        if (refined <= b.radius) return refined;
        return std::nullopt;
    }

private:
    const Region& region_;
    int n_;
    RealMatrix x_inv_;
    std::array<double, 4> x_inv2_{};
    double prefilter_ = 0;
};

inline bool exact_denominator(const std::int64_t* m, std::size_t count, const LevelIndex& level) {
    for (auto [p, k] : level) {
        bool all_divisible = true;
        for (std::size_t i = 0; i < count && all_divisible; ++i) all_divisible = (m[i] % std::int64_t(p)) == 0;
        if (all_divisible) return false;
    }
    return true;
}

struct ShardResult {
    std::vector<EnumeratedPoint> points;
    std::uint64_t count = 0;
    EnumerationStats stats;
};

// n = 2, top-row values a in [a_lo, a_hi].
inline void scan_2x2(const LevelIndex& level, std::int64_t den, const IntBounds& bd, const Membership& member,
                     std::int64_t a_lo, std::int64_t a_hi, bool collect, ShardResult& out) {
    const i128 target = i128(den) * den;
    std::array<std::int64_t, 4> m{};
    for (std::int64_t a = a_lo; a <= a_hi; ++a) {
        for (std::int64_t b = bd.lo[1]; b <= bd.hi[1]; ++b) {
            ++out.stats.top_rows;
            if (a == 0 && b == 0) continue;
            const auto eg = ext_gcd(a, b);
            if (target % eg.g != 0) continue;
            const i128 q = target / eg.g;
            const i128 d0 = i128(eg.u) * q, c0 = -i128(eg.v) * q;
            const i128 step_d = b / eg.g, step_c = a / eg.g;
            i128 tlo = std::numeric_limits<std::int64_t>::min(), thi = std::numeric_limits<std::int64_t>::max();
            clip(c0, step_c, bd.lo[2], bd.hi[2], tlo, thi);
            clip(d0, step_d, bd.lo[3], bd.hi[3], tlo, thi);
            for (i128 t = tlo; t <= thi; ++t) {
                m = {a, b, std::int64_t(c0 + t * step_c), std::int64_t(d0 + t * step_d)};
                ++out.stats.solutions;
                if (!exact_denominator(m.data(), 4, level)) continue;
                ++out.stats.primitive;
                auto dist = member.test(m.data(), den, out.stats);
                if (!dist) continue;
                ++out.stats.accepted;
                ++out.count;
                if (collect) out.points.push_back({2, {m.begin(), m.end()}, den, *dist});
            }
        }
    }
}

inline i128 det_bareiss(std::vector<i128> a, int n) {
    i128 sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[std::size_t(k * n + k)] == 0) {
            int r = k + 1;
            while (r < n && a[std::size_t(r * n + k)] == 0) ++r;
            if (r == n) return 0;
            for (int j = 0; j < n; ++j) std::swap(a[std::size_t(k * n + j)], a[std::size_t(r * n + j)]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a[std::size_t(i * n + j)] =
                    (a[std::size_t(i * n + j)] * a[std::size_t(k * n + k)] - a[std::size_t(i * n + k)] * a[std::size_t(k * n + j)]) / prev;
        prev = a[std::size_t(k * n + k)];
    }
    return sign * a[std::size_t((n - 1) * n + (n - 1))];
}

// n >= 3: odometer over the first n-1 rows; the last row solves the single
// linear equation sum_j M_{n-1,j} C_j = D^n against the cofactors C_j.
inline void scan_naive(int n, const LevelIndex& level, std::int64_t den, const IntBounds& bd, const Membership& member,
                       std::int64_t first_lo, std::int64_t first_hi, bool collect, ShardResult& out) {
    const std::size_t nn = std::size_t(n * n);
    i128 target = 1;
    for (int i = 0; i < n; ++i) target *= den;
    std::vector<std::int64_t> m(nn);
    const std::size_t free_count = std::size_t((n - 1) * n);
    // m[0] runs over [first_lo, first_hi]; the rest of the leading rows over bd
    for (std::size_t k = 0; k < free_count; ++k) m[k] = bd.lo[k];
    m[0] = first_lo;
    if (first_lo > first_hi) return;
    std::vector<i128> minor(std::size_t((n - 1) * (n - 1)));
    for (;;) {
        ++out.stats.top_rows;
        std::vector<i128> cof(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            for (int r = 0; r < n - 1; ++r) {
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[std::size_t(r * (n - 1) + cc++)] = m[std::size_t(r * n + c)];
                }
            }
            const i128 det = det_bareiss(minor, n - 1);
            cof[std::size_t(j)] = ((n - 1 + j) % 2 == 0) ? det : -det;
        }
        auto mag = [&](int j) { return cof[std::size_t(j)] < 0 ? -cof[std::size_t(j)] : cof[std::size_t(j)]; };
        int piv = -1;
        for (int j = 0; j < n; ++j)
            if (cof[std::size_t(j)] != 0 && (piv < 0 || mag(j) > mag(piv))) piv = j;
        if (piv >= 0) {
            const std::size_t base = free_count;
            std::vector<int> others;
            for (int j = 0; j < n; ++j)
                if (j != piv) others.push_back(j);
            for (std::size_t o = 0; o < others.size(); ++o) m[base + std::size_t(others[o])] = bd.lo[base + std::size_t(others[o])];
            for (;;) {
                i128 rest = target;
                for (int j : others) rest -= i128(m[base + std::size_t(j)]) * cof[std::size_t(j)];
                const i128 c = cof[std::size_t(piv)];
                if (rest % c == 0) {
                    const i128 v = rest / c;
                    if (v >= bd.lo[base + std::size_t(piv)] && v <= bd.hi[base + std::size_t(piv)]) {
                        m[base + std::size_t(piv)] = std::int64_t(v);
                        ++out.stats.solutions;
                        if (exact_denominator(m.data(), nn, level)) {
                            ++out.stats.primitive;
                            auto dist = member.test(m.data(), den, out.stats);
                            if (dist) {
                                ++out.stats.accepted;
                                ++out.count;
                                if (collect) out.points.push_back({n, m, den, *dist});
                            }
                        }
                    }
                }
                std::size_t o = 0;
                for (; o < others.size(); ++o) {
                    const std::size_t idx = base + std::size_t(others[o]);
                    if (m[idx] < bd.hi[idx]) {
                        ++m[idx];
                        break;
                    }
                    m[idx] = bd.lo[idx];
                }
                if (o == others.size()) break;
            }
        }
        std::size_t k = free_count;
        for (std::size_t idx = free_count; idx-- > 0;) {
            const std::int64_t hi = idx == 0 ? first_hi : bd.hi[idx];
            if (m[idx] < hi) {
                ++m[idx];
                k = idx;
                break;
            }
            m[idx] = idx == 0 ? first_lo : bd.lo[idx];
        }
        if (k == free_count) return;
    }
}

struct Shard {
    std::size_t level_index;
    std::int64_t lo, hi;  // range of the first entry
};

}  // namespace detail

struct LevelCount {
    LevelIndex level;
    std::uint64_t denominator = 1;
    std::uint64_t count = 0;
};

struct EnumerationReport {
    std::vector<EnumeratedPoint> points;  // sorted by (D, entries); empty unless collected
    std::vector<LevelCount> per_level;    // increasing D
    EnumerationStats stats;
    double wall_time_s = 0;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& l : per_level) t += l.count;
        return t;
    }
    // Points with height <= h, from the per-level counts.
    std::uint64_t count_up_to(std::uint64_t h) const {
        std::uint64_t t = 0;
        for (const auto& l : per_level)
            if (l.denominator <= h) t += l.count;
        return t;
    }
};

namespace detail {

inline EnumerationReport enumerate_levels(const PrimeSet& s, const std::vector<LevelIndex>& levels, const Region& region,
                                          const EnumerationOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    const int n = opt.n;
    require(n >= 2, "group dimension must be at least 2");
    if (auto rd = region.dimension()) require(*rd == n, "region dimension does not match n");
    for (const auto& level : levels)
        for (auto [p, k] : level) require(s.contains(p) && k > 0, "level uses a prime outside S");

    const Membership member(region, n);
    std::vector<IntBounds> bounds;
    std::vector<std::int64_t> dens;
    std::vector<Shard> shards;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const std::uint64_t d = level_denominator(levels[li]);
        if (d > std::uint64_t(1) << 31) throw ResourceLimit("denominator too large for 64-bit enumeration");
        dens.push_back(std::int64_t(d));
        bounds.push_back(integer_bounds(region, n, std::int64_t(d)));
        const auto& bd = bounds.back();
        if (bd.empty()) continue;
        double work = 1;
        if (n == 2) {
            work = bd.width(0) * bd.width(1);
            if (work > opt.candidate_cap) throw ResourceLimit("enumeration box exceeds the candidate cap");
        } else {
            for (std::size_t k = 0; k < std::size_t(n * n); ++k) work *= bd.width(k);
            double min_last = bd.width(std::size_t(n * (n - 1)));
            for (int j = 1; j < n; ++j) min_last = std::min(min_last, bd.width(std::size_t(n * (n - 1) + j)));
            work /= min_last;
            if (work > opt.naive_cap) throw ResourceLimit("naive n >= 3 search exceeds its resource guard");
        }
        // about 64 shards per level keeps work units even without tying
        // their boundaries to the worker count
        const std::int64_t span = bd.hi[0] - bd.lo[0] + 1;
        const std::int64_t chunk = std::max<std::int64_t>(1, span / 64);
        for (std::int64_t lo = bd.lo[0]; lo <= bd.hi[0]; lo += chunk)
            shards.push_back({li, lo, std::min(bd.hi[0], lo + chunk - 1)});
    }

    std::vector<ShardResult> results(shards.size());
    parallel_for(shards.size(), opt.workers, [&](std::size_t i) {
        const auto& sh = shards[i];
        if (n == 2)
            scan_2x2(levels[sh.level_index], dens[sh.level_index], bounds[sh.level_index], member, sh.lo, sh.hi,
                     opt.collect_points, results[i]);
        else
            scan_naive(n, levels[sh.level_index], dens[sh.level_index], bounds[sh.level_index], member, sh.lo, sh.hi,
                       opt.collect_points, results[i]);
    });

    EnumerationReport rep;
    for (std::size_t li = 0; li < levels.size(); ++li)
        rep.per_level.push_back({levels[li], std::uint64_t(dens[li]), 0});
    for (std::size_t i = 0; i < shards.size(); ++i) {
        rep.per_level[shards[i].level_index].count += results[i].count;
        rep.stats += results[i].stats;
        for (auto& p : results[i].points) rep.points.push_back(std::move(p));
    }
    std::sort(rep.points.begin(), rep.points.end());
    std::stable_sort(rep.per_level.begin(), rep.per_level.end(),
                     [](const LevelCount& x, const LevelCount& y) { return x.denominator < y.denominator; });
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace detail

// The gamma in Gamma_S of exact denominator prod p^{k_p} lying in the region.
inline std::vector<EnumeratedPoint> enumerate_level(const PrimeSet& s, const LevelIndex& level, const Region& region,
                                                    EnumerationOptions opt = {}) {
    opt.collect_points = true;
    return detail::enumerate_levels(s, {level}, region, opt).points;
}

inline EnumerationReport enumerate_up_to_height(const PrimeSet& s, std::uint64_t h, const Region& region,
                                                const EnumerationOptions& opt = {}) {
    require(h >= 1, "height bound must be at least 1");
    return detail::enumerate_levels(s, levels_up_to(s, h), region, opt);
}

// N_S(x, delta, h): closed constraints rho(x, gamma) <= delta and H(gamma) <= h.
inline std::uint64_t count_ball(const RealMatrix& x, double delta, std::uint64_t h, const PrimeSet& s,
                                const MetricSpec& metric = {}, EnumerationOptions opt = {},
                                double r_max = kDefaultRMax) {
    opt.collect_points = false;
    opt.n = int(x.rows());
    return enumerate_up_to_height(s, h, Region::ball(x, delta, metric, r_max), opt).total();
}

struct MinHeightResult {
    std::optional<std::uint64_t> height;  // nullopt: not found up to h_cap
    std::uint64_t h_cap = 0;
    std::uint64_t searched_up_to = 0;     // every height <= this was enumerated
    std::vector<EnumeratedPoint> argmin;  // all points attaining the minimum
};

// omega_S(x, delta): least height of a point of Gamma_S within delta of x.
// Heights are searched in doubling windows (h/2, h]; the first non-empty
// window holds the minimum, certified by exhaustiveness below it.
inline MinHeightResult min_height(const RealMatrix& x, double delta, const PrimeSet& s, std::uint64_t h_cap,
                                  const MetricSpec& metric = {}, EnumerationOptions opt = {},
                                  double r_max = kDefaultRMax) {
    require(h_cap >= 1, "h_cap must be at least 1");
    opt.collect_points = true;
    opt.n = int(x.rows());
    const Region region = Region::ball(x, delta, metric, r_max);
    MinHeightResult out;
    out.h_cap = h_cap;
    std::uint64_t prev = 0;
    for (std::uint64_t h = 1;; h *= 2) {
        const std::uint64_t top = std::min(h, h_cap);
        std::vector<LevelIndex> window;
        for (auto& l : levels_up_to(s, top))
            if (level_denominator(l) > prev) window.push_back(std::move(l));
        auto rep = detail::enumerate_levels(s, window, region, opt);
        out.searched_up_to = top;
        if (!rep.points.empty()) {
            const auto best = std::uint64_t(rep.points.front().denominator);
            out.height = best;
            for (auto& p : rep.points)
                if (std::uint64_t(p.denominator) == best) out.argmin.push_back(std::move(p));
            out.searched_up_to = best;
            return out;
        }
        if (top >= h_cap) return out;
        prev = top;
    }
}

}  // namespace dioph
