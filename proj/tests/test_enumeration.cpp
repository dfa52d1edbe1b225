#include <gtest/gtest.h>

#include <set>

#include "dioph/config.hpp"
#include "dioph/enumeration.hpp"
#include "dioph/height.hpp"
#include "support.hpp"

using namespace dioph;
using namespace dioph::testing;

namespace {

using Key = std::pair<std::int64_t, std::vector<std::int64_t>>;  // (D, D*gamma)

std::set<Key> keys(const std::vector<EnumeratedPoint>& pts) {
    std::set<Key> out;
    for (const auto& p : pts) out.insert({p.denominator, p.scaled});
    return out;
}

bool primitive_for(const std::vector<std::int64_t>& m, std::int64_t den) {
    for (std::int64_t p = 2; p <= den; ++p) {
        if (den % p != 0 || !is_prime(std::uint64_t(p))) continue;
        bool all = true;
        for (auto v : m) all = all && v % p == 0;
        if (all) return false;
    }
    return true;
}

// Every n x n integer matrix with entries in [-bound, bound], det = den^n,
// primitive at each p | den, accepted by `keep`.
template <class Keep>
std::set<Key> brute_force(int n, std::int64_t den, std::int64_t bound, Keep&& keep) {
    std::set<Key> out;
    const std::size_t nn = std::size_t(n * n);
    std::vector<std::int64_t> m(nn, -bound);
    std::int64_t target = 1;
    for (int i = 0; i < n; ++i) target *= den;
    for (;;) {
        if (int_det(m, n) == target && primitive_for(m, den) && keep(m)) out.insert({den, m});
        std::size_t i = 0;
        for (; i < nn; ++i) {
            if (m[i] < bound) {
                ++m[i];
                break;
            }
            m[i] = -bound;
        }
        if (i == nn) break;
    }
    return out;
}

std::set<Key> brute_force_box(int n, std::int64_t den, std::int64_t bound) {
    return brute_force(n, den, bound, [](const auto&) { return true; });
}

LevelIndex level_of(std::initializer_list<std::pair<std::uint64_t, int>> l) { return LevelIndex(l); }

RealMatrix real_of(const std::vector<std::int64_t>& m, std::int64_t den, int n) {
    RealMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = double(m[std::size_t(i * n + j)]) / double(den);
    return g;
}

}  // namespace

TEST(Levels, UpToHeight) {
    const auto ls = levels_up_to(PrimeSet::of({2, 3}), 12);
    std::vector<std::uint64_t> ds;
    for (const auto& l : ls) ds.push_back(level_denominator(l));
    EXPECT_EQ(ds, (std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 9, 12}));
    EXPECT_EQ(levels_up_to(PrimeSet::all(), 6).size(), 6u);  // 1..6
}

TEST(ExtGcd, Identity) {
    Rng rng(31);
    for (int t = 0; t < 10000; ++t) {
        const auto a = uniform_int(rng, -1000, 1000), b = uniform_int(rng, -1000, 1000);
        const auto e = detail::ext_gcd(a, b);
        EXPECT_EQ(e.g, std::gcd(a, b));
        EXPECT_EQ(a * e.u + b * e.v, e.g);
    }
}

TEST(EnumerateLevel, IdentityBall) {
    const auto pts = enumerate_level(PrimeSet::of({2}), {}, Region::ball(RealMatrix::Identity(2, 2), 0.1));
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].scaled, (std::vector<std::int64_t>{1, 0, 0, 1}));
    EXPECT_EQ(pts[0].denominator, 1);
}

TEST(EnumerateLevel, MatchesNaiveLoopOnBoxes) {
    const auto s = PrimeSet::of({2});
    for (int k = 0; k <= 2; ++k) {
        const std::int64_t den = std::int64_t(1) << k;
        for (std::int64_t bound = den; bound <= 8; ++bound) {
            const auto pts = enumerate_level(s, k == 0 ? LevelIndex{} : level_of({{2, k}}), Region::box(make_rational(bound, den)));
            EXPECT_EQ(keys(pts), brute_force_box(2, den, bound)) << "k=" << k << " bound=" << bound;
        }
    }
    // level 3 * 2 for S = {2, 3}
    const auto pts = enumerate_level(PrimeSet::of({2, 3}), level_of({{2, 1}, {3, 1}}), Region::box(make_rational(8, 6)));
    EXPECT_EQ(keys(pts), brute_force_box(2, 6, 8));
}

TEST(EnumerateUpToHeight, SL2ZBoxes) {
    for (std::int64_t r = 1; r <= 5; ++r) {
        const auto rep = enumerate_up_to_height(PrimeSet::of({2}), 1, Region::box(make_rational(r, 1)));
        EXPECT_EQ(keys(rep.points), brute_force_box(2, 1, r)) << r;
        EXPECT_EQ(rep.total(), rep.points.size());
    }
}

TEST(EnumerateUpToHeight, PartitionByLevel) {
    const auto s = PrimeSet::of({2, 3});
    const auto region = Region::box(make_rational(2, 1));
    const auto rep = enumerate_up_to_height(s, 12, region);
    std::set<Key> unioned;
    std::size_t total = 0;
    for (const auto& l : rep.per_level) {
        const auto part = enumerate_level(s, l.level, region);
        EXPECT_EQ(part.size(), l.count);
        for (const auto& p : part) {
            EXPECT_EQ(std::uint64_t(p.denominator), l.denominator);
            EXPECT_TRUE(unioned.insert({p.denominator, p.scaled}).second);  // disjoint
        }
        total += part.size();
        // brute force per level: |D gamma| <= 2 D
        EXPECT_EQ(keys(part), brute_force_box(2, std::int64_t(l.denominator), 2 * std::int64_t(l.denominator)));
    }
    EXPECT_EQ(unioned, keys(rep.points));
    EXPECT_EQ(total, rep.total());
}

TEST(EnumerateUpToHeight, BallMatchesBruteForce) {
    Rng rng(32);
    const auto s = PrimeSet::of({2, 3});
    for (int t = 0; t < 6; ++t) {
        const RealMatrix x = random_group_element(rng, 2, 0.6);
        const double delta = 0.3 + 0.1 * (t % 3);
        const auto rep = enumerate_up_to_height(s, 6, Region::ball(x, delta));
        std::set<Key> expected;
        for (std::int64_t den : {1, 2, 3, 4, 6}) {
            // crude bound: |gamma_ij| <= ||x||_F e^delta
            const std::int64_t bound = std::int64_t(std::ceil(den * x.norm() * std::exp(delta)));
            auto part = brute_force(2, den, bound, [&](const std::vector<std::int64_t>& m) {
                auto d = try_log_distance(x, real_of(m, den, 2));
                return d && *d <= delta;
            });
            expected.insert(part.begin(), part.end());
        }
        EXPECT_EQ(keys(rep.points), expected) << t;
    }
}

TEST(EnumerateUpToHeight, PostconditionsAndMonotone) {
    const auto s = PrimeSet::of({2});
    const RealMatrix e = RealMatrix::Identity(2, 2);
    const auto small = enumerate_up_to_height(s, 2, Region::ball(e, 0.5));
    for (const auto& p : small.points) {
        const auto g = p.group_point(s);
        EXPECT_TRUE(is_member(g.matrix(), s));
        EXPECT_LE(g.height(), 2);
        EXPECT_EQ(g.height(), p.denominator);
        EXPECT_LE(distance(e, p.real()), 0.5);
        EXPECT_NEAR(distance(e, p.real()), p.distance, 1e-12);
    }
    std::set<Key> prev;
    for (std::uint64_t h : {1, 2, 4, 8, 16, 32}) {
        const auto cur = keys(enumerate_up_to_height(s, h, Region::ball(e, 0.4)).points);
        EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
    }
}

TEST(EnumerateUpToHeight, SortedAndIdenticalAcrossWorkers) {
    const auto s = PrimeSet::of({2, 3});
    const RealMatrix x = generic_center(2);
    EnumerationOptions one, many;
    many.workers = 4;
    const auto a = enumerate_up_to_height(s, 72, Region::ball(x, 0.4), one);
    const auto b = enumerate_up_to_height(s, 72, Region::ball(x, 0.4), many);
    ASSERT_EQ(a.points.size(), b.points.size());
    EXPECT_TRUE(a.points == b.points);
    EXPECT_TRUE(std::is_sorted(a.points.begin(), a.points.end()));
    EXPECT_GT(a.points.size(), 50u);
}

TEST(EntryBounds, SampledBallMembersRespectBounds) {
    Rng rng(33);
    for (int n : {2, 3})
        for (int t = 0; t < 30; ++t) {
            const RealMatrix x = random_group_element(rng, n, 0.8);
            const double delta = uniform_real(rng, 0.05, 0.9);
            const auto bounds = ball_entry_bounds(MetricBall{x, delta, {}});
            for (int s = 0; s < 200; ++s) {
                const RealMatrix g = x * matrix_exp(random_sl_in_ball(rng, n, delta));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const auto& b = bounds[std::size_t(i * n + j)];
                        EXPECT_GE(g(i, j), b.lo);
                        EXPECT_LE(g(i, j), b.hi);
                    }
            }
        }
}

TEST(CountBall, Examples) {
    const RealMatrix e = RealMatrix::Identity(2, 2);
    EXPECT_EQ(count_ball(e, 0.1, 1, PrimeSet::of({2})), 1u);
    // a center far from every integral point at height 1
    RealMatrix x(2, 2);
    x << std::exp(0.45), 0, 0, std::exp(-0.45);
    EXPECT_EQ(count_ball(x, 0.05, 1, PrimeSet::of({2})), 0u);
    EXPECT_THROW(count_ball(e, 2.0, 4, PrimeSet::of({2})), OutOfDomain);
}

TEST(CountBall, HeightOneIndependentOfS) {
    Rng rng(34);
    for (int t = 0; t < 10; ++t) {
        const RealMatrix x = random_group_element(rng, 2, 0.9);
        const auto a = count_ball(x, 0.8, 1, PrimeSet::of({2}));
        EXPECT_EQ(a, count_ball(x, 0.8, 1, PrimeSet::of({3, 5})));
        EXPECT_EQ(a, count_ball(x, 0.8, 1, PrimeSet::all()));
    }
}

TEST(CountBall, MonotoneInDeltaAndH) {
    const RealMatrix x = generic_center(2);
    const auto s = PrimeSet::of({2});
    std::uint64_t prev = 0;
    for (double delta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const auto c = count_ball(x, delta, 64, s);
        EXPECT_GE(c, prev);
        prev = c;
    }
    prev = 0;
    for (std::uint64_t h : {1, 3, 8, 20, 64, 100}) {
        const auto c = count_ball(x, 0.3, h, s);
        EXPECT_GE(c, prev);
        prev = c;
    }
}

TEST(CountBall, RefinedBallContainsLogBall) {
    const RealMatrix x = generic_center(2);
    const auto s = PrimeSet::of({2});
    EnumerationOptions opt;
    opt.collect_points = true;
    const auto logp = keys(enumerate_up_to_height(s, 16, Region::ball(x, 0.3), opt).points);
    const auto ref = keys(enumerate_up_to_height(s, 16, Region::ball(x, 0.3, MetricSpec::refined(2)), opt).points);
    EXPECT_TRUE(std::includes(ref.begin(), ref.end(), logp.begin(), logp.end()));
}

TEST(MinHeight, Examples) {
    const auto s = PrimeSet::of({2});
    const RealMatrix e = RealMatrix::Identity(2, 2);
    const auto r = min_height(e, 0.2, s, 64);
    ASSERT_TRUE(r.height);
    EXPECT_EQ(*r.height, 1u);
    ASSERT_EQ(r.argmin.size(), 1u);

    // a point of Gamma_S as the center
    const auto gamma = QMatrix{{make_rational(3, 2), make_rational(1, 4)}, {make_rational(2), make_rational(1)}};
    ASSERT_EQ(gamma.det(), 1);
    RealMatrix xg(2, 2);
    const auto d = gamma.to_doubles();
    xg << d[0], d[1], d[2], d[3];
    const auto rg = min_height(xg, 0.1, s, 64);
    ASSERT_TRUE(rg.height);
    EXPECT_LE(*rg.height, 4u);
}

TEST(MinHeight, CertifiedMinimal) {
    Rng rng(35);
    const auto s = PrimeSet::of({2});
    for (int t = 0; t < 10; ++t) {
        const RealMatrix x = random_group_element(rng, 2, 0.8);
        const auto r = min_height(x, 0.3, s, 4096);
        ASSERT_TRUE(r.height);
        const auto h = *r.height;
        if (h > 1) {
            EXPECT_EQ(count_ball(x, 0.3, h - 1, s), 0u);
        }
        EXPECT_GT(count_ball(x, 0.3, h, s), 0u);
        for (const auto& p : r.argmin) EXPECT_EQ(std::uint64_t(p.denominator), h);
        EXPECT_EQ(r.argmin.size(), count_ball(x, 0.3, h, s));
    }
}

TEST(MinHeight, NotFoundCarriesCap) {
    RealMatrix x(2, 2);
    x << std::exp(0.45), 0, 0, std::exp(-0.45);
    const auto r = min_height(x, 0.01, PrimeSet::of({2}), 3);
    EXPECT_FALSE(r.height);
    EXPECT_EQ(r.h_cap, 3u);
    EXPECT_EQ(r.searched_up_to, 3u);
}

TEST(ThreeByThree, MatchesNaiveLoop) {
    const auto s = PrimeSet::of({2});
    EnumerationOptions opt;
    opt.n = 3;
    const auto one = enumerate_up_to_height(s, 1, Region::box(make_rational(1)), opt);
    EXPECT_EQ(keys(one.points), brute_force_box(3, 1, 1));
    const auto two = enumerate_level(s, level_of({{2, 1}}), Region::box(make_rational(1)), opt);
    EXPECT_EQ(keys(two), brute_force_box(3, 2, 2));
}

TEST(ThreeByThree, BallSmoke) {
    const auto s = PrimeSet::of({2});
    EnumerationOptions opt;
    opt.n = 3;
    const RealMatrix e = RealMatrix::Identity(3, 3);
    const auto rep = enumerate_up_to_height(s, 2, Region::ball(e, 0.75), opt);
    for (const auto& p : rep.points) {
        EXPECT_LE(distance(e, p.real()), 0.75);
        EXPECT_TRUE(is_member(p.matrix(), s));
    }
    const auto expected = brute_force(3, 1, 2, [&](const std::vector<std::int64_t>& m) {
        auto d = try_log_distance(e, real_of(m, 1, 3));
        return d && *d <= 0.75;
    });
    std::set<Key> level0;
    for (const auto& p : rep.points)
        if (p.denominator == 1) level0.insert({1, p.scaled});
    EXPECT_EQ(level0, expected);
    EXPECT_GT(rep.total(), 1u);
}

TEST(Guards, ResourceLimits) {
    const auto s = PrimeSet::of({2});
    EnumerationOptions opt;
    opt.candidate_cap = 1000;
    EXPECT_THROW(enumerate_up_to_height(s, 64, Region::box(make_rational(10)), opt), ResourceLimit);
    EnumerationOptions three;
    three.n = 3;
    EXPECT_THROW(enumerate_up_to_height(s, 8, Region::box(make_rational(3)), three), ResourceLimit);
    EXPECT_THROW(Region::box(make_rational(1, 2)), std::invalid_argument);
    EXPECT_THROW(Region::ball(RealMatrix::Identity(2, 2), 0.95), OutOfDomain);
    RealMatrix bad = RealMatrix::Identity(2, 2);
    bad(0, 0) = 2;
    EXPECT_THROW(Region::ball(bad, 0.1), std::invalid_argument);
    EXPECT_THROW(enumerate_level(s, level_of({{3, 1}}), Region::box(make_rational(1))), std::invalid_argument);
}
