#pragma once

#include <cstdint>
#include <map>

#include "dioph/height.hpp"

namespace dioph {

// An element of Gamma_S = SL_n(Z[S^-1]) with its height and per-prime
// denominator levels cached at construction.
class GroupPoint {
public:
    GroupPoint(QMatrix m, const PrimeSet& s) : m_(std::move(m)) {
        if (m_.det() != 1) throw std::invalid_argument("group point must have determinant 1");
        if (!denominators_over(m_, s)) throw std::invalid_argument("entry denominators do not factor over S");
        BigInt den = denominator_lcm(m_);
        BigInt rest = den;
        if (den != 1) {
            for (const auto& [p, e] : factorize(den)) {
                levels_[mpz_get_ui(p.get_mpz_t())] = static_cast<int>(e);
                rest /= pow(p, static_cast<unsigned long>(e));
            }
        }
        ensure(rest == 1, "denominator did not factor completely");
        height_ = den;
    }

    const QMatrix& matrix() const { return m_; }
    const BigInt& height() const { return height_; }
    // Only primes with a positive level are stored.
    const std::map<std::uint64_t, int>& levels() const { return levels_; }

    int level(std::uint64_t p) const {
        auto it = levels_.find(p);
        return it == levels_.end() ? 0 : it->second;
    }

    GroupPoint inverse(const PrimeSet& s) const { return GroupPoint(m_.inverse(), s); }

    friend bool operator==(const GroupPoint& a, const GroupPoint& b) { return a.m_ == b.m_; }

private:
    QMatrix m_;
    BigInt height_;
    std::map<std::uint64_t, int> levels_;
};

}  // namespace dioph
