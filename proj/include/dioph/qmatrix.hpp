#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "dioph/errors.hpp"
#include "dioph/rational.hpp"

namespace dioph {

// Square matrix over Q, row-major.
class QMatrix {
public:
    explicit QMatrix(std::size_t n) : n_(n), a_(n * n, Rational(0)) {
        require(n >= 2, "matrix dimension must be at least 2");
    }

    QMatrix(std::initializer_list<std::initializer_list<Rational>> rows) : QMatrix(rows.size()) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            require(row.size() == n_, "matrix rows must all have length n");
            std::size_t j = 0;
            for (const auto& v : row) (*this)(i, j++) = v;
            ++i;
        }
    }

    static QMatrix identity(std::size_t n) {
        QMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    // M / den for an integer matrix given row-major.
    static QMatrix from_scaled(std::size_t n, const std::vector<std::int64_t>& entries, std::int64_t den) {
        require(entries.size() == n * n, "entry count does not match dimension");
        QMatrix m(n);
        for (std::size_t k = 0; k < n * n; ++k) m.a_[k] = make_rational(entries[k], den);
        return m;
    }

    std::size_t n() const { return n_; }
    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<Rational>& entries() const { return a_; }

    friend bool operator==(const QMatrix& x, const QMatrix& y) { return x.n_ == y.n_ && x.a_ == y.a_; }

    friend QMatrix operator*(const QMatrix& x, const QMatrix& y) {
        require(x.n_ == y.n_, "dimension mismatch in product");
        QMatrix r(x.n_);
        for (std::size_t i = 0; i < x.n_; ++i)
            for (std::size_t k = 0; k < x.n_; ++k) {
                if (x(i, k) == 0) continue;
                for (std::size_t j = 0; j < x.n_; ++j) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }

    QMatrix scaled(const Rational& s) const {
        QMatrix r = *this;
        for (auto& v : r.a_) v *= s;
        return r;
    }

    Rational det() const {
        QMatrix m = *this;
        Rational d = 1;
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t piv = c;
            while (piv < n_ && m(piv, c) == 0) ++piv;
            if (piv == n_) return 0;
            if (piv != c) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(m(piv, j), m(c, j));
                d = -d;
            }
            d *= m(c, c);
            for (std::size_t r = c + 1; r < n_; ++r) {
                if (m(r, c) == 0) continue;
                Rational f = m(r, c) / m(c, c);
                for (std::size_t j = c; j < n_; ++j) m(r, j) -= f * m(c, j);
            }
        }
        return d;
    }

    QMatrix inverse() const {
        QMatrix m = *this;
        QMatrix inv = identity(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t piv = c;
            while (piv < n_ && m(piv, c) == 0) ++piv;
            if (piv == n_) throw OutOfDomain("singular matrix has no inverse");
            for (std::size_t j = 0; j < n_; ++j) {
                std::swap(m(piv, j), m(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
            Rational s = 1 / m(c, c);
            for (std::size_t j = 0; j < n_; ++j) {
                m(c, j) *= s;
                inv(c, j) *= s;
            }
            for (std::size_t r = 0; r < n_; ++r) {
                if (r == c || m(r, c) == 0) continue;
                Rational f = m(r, c);
                for (std::size_t j = 0; j < n_; ++j) {
                    m(r, j) -= f * m(c, j);
                    inv(r, j) -= f * inv(c, j);
                }
            }
        }
        return inv;
    }

    std::vector<double> to_doubles() const {
        std::vector<double> out;
        out.reserve(a_.size());
        for (const auto& v : a_) out.push_back(v.get_d());
        return out;
    }

private:
    std::size_t n_;
    std::vector<Rational> a_;
};

// JSON form: nested arrays of "num/den" strings.
inline nlohmann::json to_json(const QMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.n(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.n(); ++j) row.push_back(to_string(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline QMatrix qmatrix_from_json(const nlohmann::json& j) {
    require(j.is_array() && !j.empty(), "matrix JSON must be a non-empty array of rows");
    QMatrix m(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].is_array() && j[i].size() == j.size(), "matrix JSON must be square");
        for (std::size_t k = 0; k < j.size(); ++k) {
            const auto& v = j[i][k];
            m(i, k) = v.is_string() ? parse_rational(v.get<std::string>()) : make_rational(v.get<std::int64_t>());
        }
    }
    return m;
}

}  // namespace dioph
