#pragma once

// Exact spectral data of flat tori R^n / Lambda: dual lattices, eigenvalue
// shells |kappa|^2 with antipodal representatives, and the algebraic
// degeneracy criteria driven by the systems  sum_j mu_j = 0  and
// sum_j mu_j kappa_j kappa_j^T = 0  over the shell representatives.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "speclab/common.hpp"
#include "speclab/exact.hpp"
#include "speclab/linalg.hpp"

namespace speclab {

struct Lattice {
    int dim = 0;
    Matrix basis;  // columns generate Lambda

    Lattice() = default;
    Lattice(int n, Matrix b) : dim(n), basis(std::move(b)) { validate(); }

    void validate() const {
        if (dim < 2 || dim > 4) throw ValidationError("Lattice: dim must be in {2,3,4}");
        if (basis.rows() != dim || basis.cols() != dim) throw ValidationError("Lattice: basis must be dim x dim");
        if (!basis.allFinite()) throw ValidationError("Lattice: NaN/Inf in basis");
        const double scale = std::pow(basis.norm() / std::sqrt(static_cast<double>(dim)), dim);
        if (std::abs(basis.determinant()) <= 1e-12 * std::max(scale, 1e-300))
            throw ValidationError("Lattice: basis is singular");
    }

    double covolume() const { return std::abs(basis.determinant()); }
};

struct DualLattice {
    Matrix basis;  // inverse transpose of the primal basis
};

inline DualLattice dual_lattice(const Lattice& lattice) {
    lattice.validate();
    return {lattice.basis.inverse().transpose()};
}

// One eigenvalue shell of the flat torus. `rep_coeffs` are the integer
// coordinates of one representative per antipodal pair {kappa, -kappa} in the
// dual basis, chosen with first nonzero coordinate positive and ordered
// lexicographically descending; `representatives` are the vectors kappa.
struct TorusEigenvalue {
    double norm_sq = 0.0;
    double lambda = 0.0;  // -4 pi^2 norm_sq
    int multiplicity = 0;
    std::vector<IntVector> rep_coeffs;
    std::vector<Vector> representatives;
    bool exact_grouping = false;
    bool grouping_warning = false;  // inexact grouping with near-equal neighbor shells
};

enum class Degeneracy { Nondegenerate, ConformallyDegenerate, Degenerate };

inline std::string to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::Nondegenerate: return "nondegenerate";
        case Degeneracy::ConformallyDegenerate: return "conformally_degenerate";
        case Degeneracy::Degenerate: return "degenerate";
    }
    return "?";
}

struct DegeneracyReport {
    Degeneracy classification = Degeneracy::Nondegenerate;
    int k_c = 0;  // nullity of  sum_j mu_j = 0
    int k_f = 0;  // nullity of the stacked kappa kappa^T system
    std::vector<Vector> full_witnesses;       // mu vectors, integer-scaled
    std::vector<Vector> conformal_witnesses;  // basis of { mu : sum mu = 0 }
    std::vector<SymMatrix> matrix_witnesses;  // filled by the sampled-basis classifier
};

namespace detail {

// Continued-fraction reconstruction of p/q close to x. Returns nothing when no
// denominator <= max_den approximates x to tol.
inline std::optional<Rational> rationalize(double x, double tol = 1e-12, long max_den = 1000000) {
    if (!std::isfinite(x)) return std::nullopt;
    const double scale = std::max(1.0, std::abs(x));
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) return std::nullopt;
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol * scale) {
            Rational r(static_cast<long>(p1), static_cast<long>(q1));
            r.canonicalize();
            return r;
        }
        const double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

inline std::optional<std::vector<std::vector<Rational>>> rational_gram(const Matrix& dual_basis) {
    const Matrix g = dual_basis.transpose() * dual_basis;
    const int n = static_cast<int>(g.rows());
    std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto r = rationalize(g(i, j));
            if (!r) return std::nullopt;
            out[i][j] = *r;
        }
    return out;
}

inline bool lex_positive(const IntVector& c) {
    for (int i = 0; i < c.size(); ++i) {
        if (c[i] > 0) return true;
        if (c[i] < 0) return false;
    }
    return false;  // zero vector
}

inline bool lex_greater(const IntVector& a, const IntVector& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

}  // namespace detail

// All shells 0 < |kappa|^2 <= norm_sq_max on the dual lattice, by brute force
// over the coefficient box |c_i| <= sqrt(norm_sq_max) * |b_i|. Shells are
// grouped exactly when the dual Gram matrix reconstructs as rational, else by
// relative 1e-9 with a warning flag on near-collisions.
inline std::vector<TorusEigenvalue> enumerate_spectrum(const Lattice& lattice, double norm_sq_max) {
    lattice.validate();
    if (!(norm_sq_max > 0)) throw ValidationError("enumerate_spectrum: norm_sq_max must be positive");
    const int n = lattice.dim;
    const DualLattice dual = dual_lattice(lattice);
    const Matrix gram = dual.basis.transpose() * dual.basis;
    const auto exact_gram = detail::rational_gram(dual.basis);

    std::vector<int> box(n);
    for (int i = 0; i < n; ++i)
        box[i] = static_cast<int>(std::floor(std::sqrt(norm_sq_max) * lattice.basis.col(i).norm() + 1e-9)) + 1;

    struct Shell {
        double norm_sq;
        Rational exact_norm_sq;
        std::vector<IntVector> coeffs;
    };
    std::vector<Shell> shells;
    std::map<Rational, size_t> exact_index;

    const double rel_tol = 1e-9;
    auto shell_for_inexact = [&](double q) -> Shell& {
        for (auto& s : shells)
            if (std::abs(s.norm_sq - q) <= rel_tol * (1.0 + std::max(s.norm_sq, q))) return s;
        shells.push_back({q, Rational(0), {}});
        return shells.back();
    };

    IntVector c = IntVector::Zero(n);
    std::vector<int> idx(n, 0);
    // odometer over the box
    for (int i = 0; i < n; ++i) { idx[i] = -box[i]; }
    while (true) {
        for (int i = 0; i < n; ++i) c[i] = idx[i];
        if (detail::lex_positive(c)) {
            if (exact_gram) {
                Rational q(0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) q += (*exact_gram)[i][j] * c[i] * c[j];
                q.canonicalize();
                if (q > 0 && q.get_d() <= norm_sq_max * (1 + 1e-12)) {
                    auto it = exact_index.find(q);
                    if (it == exact_index.end()) {
                        exact_index.emplace(q, shells.size());
                        shells.push_back({q.get_d(), q, {}});
                        shells.back().coeffs.push_back(c);
                    } else {
                        shells[it->second].coeffs.push_back(c);
                    }
                }
            } else {
                const double q = (gram * c.cast<double>()).dot(c.cast<double>());
                if (q > 0 && q <= norm_sq_max * (1 + rel_tol)) shell_for_inexact(q).coeffs.push_back(c);
            }
        }
        int d = n - 1;
        while (d >= 0 && idx[d] == box[d]) { idx[d] = -box[d]; --d; }
        if (d < 0) break;
        ++idx[d];
    }

    std::sort(shells.begin(), shells.end(), [](const Shell& a, const Shell& b) { return a.norm_sq < b.norm_sq; });

    std::vector<TorusEigenvalue> out;
    for (size_t s = 0; s < shells.size(); ++s) {
        auto& sh = shells[s];
        if (sh.coeffs.empty()) continue;
        std::sort(sh.coeffs.begin(), sh.coeffs.end(), detail::lex_greater);
        TorusEigenvalue ev;
        ev.exact_grouping = exact_gram.has_value();
        ev.norm_sq = sh.norm_sq;
        ev.lambda = -4.0 * kPi * kPi * sh.norm_sq;
        ev.multiplicity = 2 * static_cast<int>(sh.coeffs.size());
        ev.rep_coeffs = sh.coeffs;
        for (const auto& cc : sh.coeffs) ev.representatives.push_back(dual.basis * cc.cast<double>());
        if (!exact_gram) {
            const double here = sh.norm_sq;
            for (size_t t = 0; t < shells.size(); ++t)
                if (t != s && std::abs(shells[t].norm_sq - here) <= 10 * rel_tol * (1.0 + here))
                    ev.grouping_warning = true;
        }
        out.push_back(std::move(ev));
    }
    return out;
}

// Classification of one shell. The full system is solved exactly on the
// integer coefficient vectors: kappa = D c with D invertible, so
// sum mu_j kappa_j kappa_j^T = 0  iff  sum mu_j c_j c_j^T = 0.
inline DegeneracyReport torus_degeneracy(const TorusEigenvalue& eig) {
    if (!(eig.norm_sq > 0)) throw ValidationError("torus_degeneracy: zero eigenvalue is excluded");
    const int m = static_cast<int>(eig.rep_coeffs.size());
    if (m == 0) throw ValidationError("torus_degeneracy: no representatives");
    const int n = static_cast<int>(eig.rep_coeffs[0].size());

    DegeneracyReport rep;
    rep.k_c = m - 1;
    for (int j = 1; j < m; ++j) {
        Vector w = Vector::Zero(m);
        w[0] = 1.0;
        w[j] = -1.0;
        rep.conformal_witnesses.push_back(w);
    }

    ExactMatrix sys(n * (n + 1) / 2, m);
    for (int j = 0; j < m; ++j) {
        const IntVector& c = eig.rep_coeffs[j];
        int row = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) sys.at(row++, j) = Rational(static_cast<long>(c[a]) * c[b]);
    }
    rep.k_f = m - static_cast<int>(exact_rank(sys));
    if (rep.k_f > 0) {
        for (const auto& v : exact_nullspace(sys)) {
            Vector mu(m);
            for (int j = 0; j < m; ++j) mu[j] = v[j].get_d();
            rep.full_witnesses.push_back(mu);
        }
    }

    rep.classification = rep.k_f >= 1 ? Degeneracy::Degenerate
                       : rep.k_c >= 1 ? Degeneracy::ConformallyDegenerate
                                      : Degeneracy::Nondegenerate;
    return rep;
}

// Pair coefficients mu over {cos, sin} pairs, expanded to the coefficient
// matrix A = diag(mu_1, mu_1, mu_2, mu_2, ...) in the ordered real eigenbasis
// (cos 2 pi kappa_1 x, sin 2 pi kappa_1 x, ...).
inline SymMatrix relation_to_eigenbasis_matrix(const TorusEigenvalue& eig, const Vector& mu) {
    const int m = static_cast<int>(eig.rep_coeffs.size());
    if (mu.size() != m) throw ValidationError("relation_to_eigenbasis_matrix: |mu| != |representatives|");
    SymMatrix a(2 * m);
    for (int j = 0; j < m; ++j) {
        a.at(2 * j, 2 * j) = mu[j];
        a.at(2 * j + 1, 2 * j + 1) = mu[j];
    }
    return a;
}

}  // namespace speclab
