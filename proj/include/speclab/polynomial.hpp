#pragma once

// Multivariate polynomials with exact rational coefficients, indexed by
// exponent tuples. Only what the harmonic-polynomial machinery needs:
// Laplacian, partials, products, and coefficient vectors over a monomial list.

#include <map>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/exact.hpp"

namespace speclab {

using Exponents = std::vector<int>;

// All exponent tuples of the given total degree, lexicographically descending
// (x0^d first). Deterministic ordering shared by every coefficient matrix.
inline std::vector<Exponents> monomials(int num_vars, int degree) {
    std::vector<Exponents> out;
    if (num_vars <= 0 || degree < 0) return out;
    Exponents cur(num_vars, 0);
    auto rec = [&](auto&& self, int var, int rem) -> void {
        if (var == num_vars - 1) {
            cur[var] = rem;
            out.push_back(cur);
            return;
        }
        for (int e = rem; e >= 0; --e) {
            cur[var] = e;
            self(self, var + 1, rem - e);
        }
        cur[var] = 0;
    };
    rec(rec, 0, degree);
    return out;
}

inline long monomial_count(int num_vars, int degree) {
    return binomial(num_vars - 1 + degree, num_vars - 1);
}

// Homogeneous polynomial of fixed degree; every stored exponent tuple sums to
// the degree.
struct HomogPoly {
    int num_vars = 0;
    int degree = 0;
    std::map<Exponents, Rational> coeffs;

    HomogPoly() = default;
    HomogPoly(int nv, int d) : num_vars(nv), degree(d) {}

    static HomogPoly monomial(int nv, const Exponents& e, const Rational& c = Rational(1)) {
        int d = 0;
        for (int x : e) d += x;
        HomogPoly p(nv, d);
        if (c != 0) p.coeffs[e] = c;
        return p;
    }

    void add_term(const Exponents& e, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = coeffs.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) coeffs.erase(it);
        }
    }

    bool is_zero() const { return coeffs.empty(); }

    HomogPoly partial(int var) const {
        HomogPoly out(num_vars, degree > 0 ? degree - 1 : 0);
        for (const auto& [e, c] : coeffs) {
            if (e[var] == 0) continue;
            Exponents f = e;
            f[var] -= 1;
            out.add_term(f, c * e[var]);
        }
        return out;
    }

    HomogPoly laplacian() const {
        HomogPoly out(num_vars, degree >= 2 ? degree - 2 : 0);
        for (const auto& [e, c] : coeffs)
            for (int v = 0; v < num_vars; ++v) {
                if (e[v] < 2) continue;
                Exponents f = e;
                f[v] -= 2;
                out.add_term(f, c * e[v] * (e[v] - 1));
            }
        return out;
    }

    HomogPoly operator*(const HomogPoly& other) const {
        HomogPoly out(num_vars, degree + other.degree);
        for (const auto& [e1, c1] : coeffs)
            for (const auto& [e2, c2] : other.coeffs) {
                Exponents e = e1;
                for (int v = 0; v < num_vars; ++v) e[v] += e2[v];
                out.add_term(e, c1 * c2);
            }
        return out;
    }

    HomogPoly operator+(const HomogPoly& other) const {
        HomogPoly out = *this;
        for (const auto& [e, c] : other.coeffs) out.add_term(e, c);
        return out;
    }

    HomogPoly scaled(const Rational& s) const {
        HomogPoly out(num_vars, degree);
        if (s == 0) return out;
        for (const auto& [e, c] : coeffs) out.coeffs[e] = c * s;
        return out;
    }

    // Coefficient vector over a monomial list (index map built by caller).
    void write_coeffs(const std::map<Exponents, long>& index, ExactMatrix& m, long row) const {
        for (const auto& [e, c] : coeffs) {
            auto it = index.find(e);
            if (it == index.end()) throw ComputeError("HomogPoly: monomial outside target basis");
            m.at(row, it->second) = c;
        }
    }
};

inline std::map<Exponents, long> monomial_index(const std::vector<Exponents>& mons) {
    std::map<Exponents, long> idx;
    for (size_t i = 0; i < mons.size(); ++i) idx[mons[i]] = static_cast<long>(i);
    return idx;
}

}  // namespace speclab
