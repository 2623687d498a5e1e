#pragma once

// Exact rational linear algebra: rank over Q via fraction-free (Bareiss)
// elimination on an integer copy, and exact null spaces via rational RREF.
// Entries never touch floating point.

#include <vector>

#include <gmpxx.h>

#include "speclab/common.hpp"

namespace speclab {

using Rational = mpq_class;

class ExactMatrix {
public:
    ExactMatrix(long rows, long cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {
        if (rows <= 0 || cols <= 0) throw ValidationError("ExactMatrix: dimensions must be positive");
    }

    long rows() const { return rows_; }
    long cols() const { return cols_; }

    Rational& at(long r, long c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Rational& at(long r, long c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    ExactMatrix transpose() const {
        ExactMatrix t(cols_, rows_);
        for (long r = 0; r < rows_; ++r)
            for (long c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    static ExactMatrix identity(long n) {
        ExactMatrix m(n, n);
        for (long i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

private:
    long rows_, cols_;
    std::vector<Rational> a_;
};

// Rank over Q. Denominators are cleared row-wise, then Bareiss elimination
// keeps every intermediate an exact integer (each division is known exact).
inline long exact_rank(const ExactMatrix& m) {
    const long rows = m.rows(), cols = m.cols();
    std::vector<std::vector<mpz_class>> b(rows, std::vector<mpz_class>(cols));
    for (long r = 0; r < rows; ++r) {
        mpz_class lcm_den = 1;
        for (long c = 0; c < cols; ++c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), m.at(r, c).get_den().get_mpz_t());
        for (long c = 0; c < cols; ++c) {
            Rational scaled = m.at(r, c) * Rational(lcm_den);
            scaled.canonicalize();
            b[r][c] = scaled.get_num();
        }
    }

    mpz_class prev = 1;
    long rank = 0;
    long row = 0;
    for (long col = 0; col < cols && row < rows; ++col) {
        long pivot = -1;
        for (long r = row; r < rows; ++r)
            if (b[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        if (pivot != row) std::swap(b[pivot], b[row]);
        for (long r = row + 1; r < rows; ++r) {
            for (long c = col + 1; c < cols; ++c) {
                mpz_class t = b[row][col] * b[r][c] - b[r][col] * b[row][c];
                mpz_divexact(b[r][c].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            b[r][col] = 0;
        }
        prev = b[row][col];
        ++rank;
        ++row;
    }
    return rank;
}

namespace detail {

struct Rref {
    std::vector<std::vector<Rational>> m;
    std::vector<long> pivot_cols;
};

inline Rref rational_rref(const ExactMatrix& in) {
    Rref r;
    r.m.assign(in.rows(), std::vector<Rational>(in.cols()));
    for (long i = 0; i < in.rows(); ++i)
        for (long j = 0; j < in.cols(); ++j) r.m[i][j] = in.at(i, j);

    long row = 0;
    for (long col = 0; col < in.cols() && row < in.rows(); ++col) {
        long pivot = -1;
        for (long i = row; i < in.rows(); ++i)
            if (r.m[i][col] != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != row) std::swap(r.m[pivot], r.m[row]);
        const Rational inv = 1 / r.m[row][col];
        for (long j = col; j < in.cols(); ++j) r.m[row][j] *= inv;
        for (long i = 0; i < in.rows(); ++i) {
            if (i == row || r.m[i][col] == 0) continue;
            const Rational f = r.m[i][col];
            for (long j = col; j < in.cols(); ++j) r.m[i][j] -= f * r.m[row][j];
        }
        r.pivot_cols.push_back(col);
        ++row;
    }
    return r;
}

}  // namespace detail

// Exact right null-space basis. Vectors are scaled to coprime integers with
// the first nonzero entry positive, so witnesses print cleanly.
inline std::vector<std::vector<Rational>> exact_nullspace(const ExactMatrix& m) {
    const detail::Rref r = detail::rational_rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (long c : r.pivot_cols) is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (long f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(m.cols(), 0);
        v[f] = 1;
        for (size_t i = 0; i < r.pivot_cols.size(); ++i) v[r.pivot_cols[i]] = -r.m[i][f];

        mpz_class lcm_den = 1, gcd_num = 0;
        for (auto& x : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
        for (auto& x : v) {
            x *= Rational(lcm_den);
            x.canonicalize();
            mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), x.get_num().get_mpz_t());
        }
        if (gcd_num > 1)
            for (auto& x : v) { x /= Rational(gcd_num); x.canonicalize(); }
        for (auto& x : v) {
            if (x == 0) continue;
            if (x < 0)
                for (auto& y : v) y = -y;
            break;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

inline long exact_nullity(const ExactMatrix& m) { return m.cols() - exact_rank(m); }

}  // namespace speclab
