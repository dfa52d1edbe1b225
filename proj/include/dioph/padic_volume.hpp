#pragma once

// Haar volumes of p-adic and S-adic height balls in SL_2, with
// m_p(SL_2(Z_p)) = 1.
//
// The ball {g in SL_2(Q_p) : ||g||_p <= p^k} is right SL_2(Z_p)-invariant,
// so its volume is the number of cosets g SL_2(Z_p) it contains. Cosets are
// lattices g Z_p^2 of covolume one, i.e. the type-0 vertices of the
// Bruhat-Tits tree. The oracle walks the tree breadth-first and measures each
// vertex's norm; the closed form is checked against it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "dioph/primes.hpp"
#include "dioph/rational.hpp"

namespace dioph {

enum class Provenance { oracle, closed_form };

inline const char* to_string(Provenance p) { return p == Provenance::oracle ? "oracle" : "closed_form"; }

struct LocalVolumeOptions {
    int k_max = 12;
    // Upper bound on tree vertices the oracle may visit.
    std::uint64_t vertex_cap = 1u << 21;
};

namespace detail {

// Primitive lattice spanned by the columns of [[p^a, b], [0, p^c]], 0 <= b < p^a.
struct TreeVertex {
    int a = 0;
    int c = 0;
    std::uint64_t b = 0;
    friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

struct TreeVertexHash {
    std::size_t operator()(const TreeVertex& v) const noexcept {
        std::uint64_t h = v.b * 0x9E3779B97F4A7C15ull;
        h ^= (std::uint64_t(v.a) << 32 | std::uint64_t(v.c)) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
        return std::size_t(h);
    }
};

inline std::uint64_t ipow(std::uint64_t p, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

inline int val_u64(std::uint64_t v, std::uint64_t p) {
    int k = 0;
    while (v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

inline TreeVertex make_primitive(int a, int c, std::uint64_t b, std::uint64_t p) {
    int m = std::min(a, c);
    if (b != 0) m = std::min(m, val_u64(b, p));
    return {a - m, c - m, b / ipow(p, m)};
}

// Classes of the p + 1 index-p sublattices L N, with N = [[p, t], [0, 1]]
// (t = 0..p-1) and N = [[1, 0], [0, p]].
inline void for_each_neighbor(const TreeVertex& v, std::uint64_t p, const std::function<void(const TreeVertex&)>& fn) {
    const std::uint64_t pa = ipow(p, v.a);
    for (std::uint64_t t = 0; t < p; ++t) fn(make_primitive(v.a + 1, v.c, v.b + pa * t, p));
    fn(make_primitive(v.a, v.c + 1, (v.b * p) % pa, p));
}

// Exponent m with ||g||_p = p^m for the covolume-one representative
// g = p^{-(a+c)/2} [[p^a, b], [0, p^c]] of a type-0 vertex.
inline int covolume_one_norm_exponent(const TreeVertex& v, std::uint64_t p) {
    int min_val = std::min(v.a, v.c);
    if (v.b != 0) min_val = std::min(min_val, val_u64(v.b, p));
    return (v.a + v.c) / 2 - min_val;
}

}  // namespace detail

// Ball volumes v_p(0), ..., v_p(k) from a breadth-first walk of the tree out
// to distance 2k.
inline std::vector<Rational> local_ball_volumes_oracle(std::uint64_t p, int k, int n = 2,
                                                       const LocalVolumeOptions& opt = {}) {
    if (n != 2) throw Unimplemented("local ball volume oracle is implemented for SL_2 only");
    require(is_prime(p), std::to_string(p) + " is not prime");
    require(k >= 0, "level must be non-negative");
    if (k > opt.k_max) throw ResourceLimit("level " + std::to_string(k) + " exceeds k_max");
    // truncation modulus p^(2k+2) must fit in 63 bits
    const double bits = (2.0 * k + 2) * std::log2(double(p));
    if (bits > 62) throw ResourceLimit("level too deep for 64-bit lattice coordinates");
    const double vertices = 1 + double(p + 1) * (std::pow(double(p), 2.0 * k) - 1) / double(p - 1);
    if (vertices > double(opt.vertex_cap)) throw ResourceLimit("tree ball exceeds the vertex cap");

    std::vector<std::uint64_t> count(std::size_t(k) + 1, 0);
    std::unordered_set<detail::TreeVertex, detail::TreeVertexHash> seen;
    seen.reserve(std::size_t(vertices) + 16);
    std::deque<std::pair<detail::TreeVertex, int>> queue;
    const detail::TreeVertex root{};
    seen.insert(root);
    queue.emplace_back(root, 0);
    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        if ((v.a + v.c) % 2 == 0) {
            const int m = detail::covolume_one_norm_exponent(v, p);
            if (m <= k) ++count[std::size_t(m)];
        }
        if (depth == 2 * k) continue;
        detail::for_each_neighbor(v, p, [&](const detail::TreeVertex& w) {
            if (seen.insert(w).second) queue.emplace_back(w, depth + 1);
        });
    }
    std::vector<Rational> out;
    std::uint64_t running = 0;
    for (auto c : count) {
        running += c;
        out.emplace_back(static_cast<unsigned long>(running));
    }
    return out;
}

inline Rational local_ball_volume_oracle(std::uint64_t p, int k, int n = 2, const LocalVolumeOptions& opt = {}) {
    return local_ball_volumes_oracle(p, k, n, opt).back();
}

// 1 + sum_{m=1}^{k} (p+1) p^{2m-1} = (p^{2k+1} - 1)/(p - 1): the base vertex
// plus the Cartan cells K diag(p^-m, p^m) K, each of (p+1) p^{2m-1} cosets.
inline Rational local_ball_volume_closed_form(std::uint64_t p, int k, int n = 2) {
    if (n != 2) throw Unimplemented("local ball volume closed form is implemented for SL_2 only");
    require(is_prime(p), std::to_string(p) + " is not prime");
    require(k >= 0, "level must be non-negative");
    const BigInt bp(static_cast<unsigned long>(p));
    return Rational((pow(bp, static_cast<unsigned long>(2 * k + 1)) - 1) / (bp - 1));
}

struct HeightBallSpec {
    PrimeSet S;
    std::uint64_t h = 1;

    HeightBallSpec(PrimeSet s, std::uint64_t height) : S(std::move(s)), h(height) {
        require(h >= 1, "height bound must be at least 1");
    }
};

// Largest k with p^k <= h.
inline int max_level(std::uint64_t p, std::uint64_t h) {
    int k = 0;
    std::uint64_t pk = 1;
    while (pk <= h / p) {
        pk *= p;
        ++k;
    }
    return k;
}

// Local ball volumes v_p(k) and sphere volumes s_p(k) = v_p(k) - v_p(k-1).
class VolumeTable {
public:
    struct Entry {
        Rational ball;
        Rational sphere;
        Provenance provenance = Provenance::closed_form;
    };

    // Levels 0..max_level(p, h) for each prime. The oracle covers every level
    // its resource guards allow; the closed form is checked against it there
    // and used alone beyond.
    static VolumeTable build(const std::vector<std::uint64_t>& primes, std::uint64_t h,
                             const LocalVolumeOptions& opt = {}) {
        VolumeTable t;
        for (auto p : primes) t.add_prime(p, max_level(p, h), opt);
        return t;
    }

    // Levels 0..top for one prime.
    static VolumeTable for_prime(std::uint64_t p, int top, const LocalVolumeOptions& opt = {}) {
        require(is_prime(p), std::to_string(p) + " is not prime");
        require(top >= 0, "level must be non-negative");
        VolumeTable t;
        t.add_prime(p, top, opt);
        return t;
    }

    const std::map<std::uint64_t, std::vector<Entry>>& rows() const { return rows_; }

    int top_level(std::uint64_t p) const { return int(rows_.at(p).size()) - 1; }
    const Entry& at(std::uint64_t p, int k) const { return rows_.at(p).at(std::size_t(k)); }

private:
    void add_prime(std::uint64_t p, int top, const LocalVolumeOptions& opt) {
        std::vector<Rational> oracle;
        for (int k = top; k >= 0 && oracle.empty(); --k) {
            try {
                oracle = local_ball_volumes_oracle(p, k, 2, opt);
            } catch (const ResourceLimit&) {
            }
        }
        auto& rows = rows_[p];
        rows.clear();
        for (int k = 0; k <= top; ++k) {
            Entry e;
            e.ball = local_ball_volume_closed_form(p, k);
            if (std::size_t(k) < oracle.size()) {
                ensure(oracle[std::size_t(k)] == e.ball,
                       "closed form disagrees with the tree oracle at p=" + std::to_string(p) + ", k=" + std::to_string(k));
                e.provenance = Provenance::oracle;
            }
            e.sphere = k == 0 ? e.ball : e.ball - rows.back().ball;
            rows.push_back(std::move(e));
        }
    }

    std::map<std::uint64_t, std::vector<Entry>> rows_;
};

// m_S(B_S(h)) = sum over level vectors (k_p) with prod p^{k_p} <= h of
// prod s_p(k_p), by depth-first descent over the primes of S.
inline Rational global_height_ball_volume(const HeightBallSpec& spec, const VolumeTable& table) {
    const auto primes = spec.S.resolve(spec.h);
    std::function<Rational(std::size_t, std::uint64_t)> descend = [&](std::size_t i, std::uint64_t budget) {
        if (i == primes.size() || primes[i] > budget) return Rational(1);
        const auto p = primes[i];
        Rational total = 0;
        std::uint64_t pk = 1;
        for (int k = 0;; ++k) {
            total += table.at(p, k).sphere * descend(i + 1, budget / pk);
            if (pk > budget / p) break;
            pk *= p;
        }
        return total;
    };
    return descend(0, spec.h);
}

inline Rational global_height_ball_volume(const HeightBallSpec& spec, const LocalVolumeOptions& opt = {}) {
    return global_height_ball_volume(spec, VolumeTable::build(spec.S.resolve(spec.h), spec.h, opt));
}

struct LogLogFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 1;
};

// Least squares of log y against log x; two points give the exact secant.
inline LogLogFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "need at least two points");
    const double m = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0 && y[i] > 0, "log-log fit needs positive values");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0, "degenerate grid: all x values coincide");
    LogLogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

struct GrowthFit {
    double a_hat = 0;
    double r_squared = 0;
};

inline void require_growth_grid(const std::vector<std::uint64_t>& h_grid) {
    require(h_grid.size() >= 4, "degenerate grid: growth fit needs at least 4 heights");
    const auto [lo, hi] = std::minmax_element(h_grid.begin(), h_grid.end());
    require(*lo >= 1 && std::log10(double(*hi) / double(*lo)) >= 2.0,
            "degenerate grid: heights must span at least two decades");
}

inline GrowthFit growth_fit(const std::vector<std::uint64_t>& h_grid, const std::function<double(std::uint64_t)>& volume) {
    require_growth_grid(h_grid);
    std::vector<double> x, y;
    for (auto h : h_grid) {
        x.push_back(double(h));
        y.push_back(volume(h));
    }
    auto f = log_log_fit(x, y);
    return {f.slope, f.r_squared};
}

// Growth exponent of h -> m_S(B_S(h)).
inline GrowthFit growth_fit(const PrimeSet& s, const std::vector<std::uint64_t>& h_grid,
                            const LocalVolumeOptions& opt = {}) {
    require_growth_grid(h_grid);
    const auto hmax = *std::max_element(h_grid.begin(), h_grid.end());
    const auto table = VolumeTable::build(s.resolve(hmax), hmax, opt);
    auto fit = growth_fit(h_grid, [&](std::uint64_t h) {
        return global_height_ball_volume(HeightBallSpec(s, h), table).get_d();
    });
    ensure(fit.a_hat > 0, "height-ball volumes must grow with h");
    return fit;
}

}  // namespace dioph
