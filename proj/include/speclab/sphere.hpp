#pragma once

// Exact polynomial harmonic analysis on round spheres S^n (n+1 ambient
// variables): harmonic bases of fixed degree, the symmetric product map
// (u, v) -> uv into degree-2l polynomials, the ambient gradient-product map
// into degree-(2l-2) polynomials, and the S^3 dimension-count shortcut.
// Every rank here is certified over Q; no floating point is involved.

#include <string>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/exact.hpp"
#include "speclab/polynomial.hpp"

namespace speclab {

struct HarmonicBasis {
    int num_vars = 0;
    int degree = 0;
    std::vector<HomogPoly> polys;  // annihilated by the Euclidean Laplacian

    int size() const { return static_cast<int>(polys.size()); }
};

inline long harmonic_dimension(int n, int ell) {
    // n = sphere dimension, ambient vars = n+1
    return binomial(n + ell, n) - binomial(n + ell - 2, n);
}

// Basis of harmonic homogeneous polynomials as the exact integer null space of
// the Laplacian coefficient matrix E_l -> E_{l-2}.
inline HarmonicBasis harmonic_basis(int num_vars, int degree) {
    if (num_vars < 3 || num_vars > 5) throw ValidationError("harmonic_basis: num_vars must be in {3,4,5}");
    if (degree < 0) throw ValidationError("harmonic_basis: degree must be nonnegative");

    const auto mons = monomials(num_vars, degree);
    HarmonicBasis basis;
    basis.num_vars = num_vars;
    basis.degree = degree;

    if (degree < 2) {
        for (const auto& e : mons) basis.polys.push_back(HomogPoly::monomial(num_vars, e));
        return basis;
    }

    const auto mons_lo = monomials(num_vars, degree - 2);
    const auto idx_lo = monomial_index(mons_lo);
    ExactMatrix lap(static_cast<long>(mons_lo.size()), static_cast<long>(mons.size()));
    for (size_t j = 0; j < mons.size(); ++j) {
        const HomogPoly dm = HomogPoly::monomial(num_vars, mons[j]).laplacian();
        for (const auto& [e, c] : dm.coeffs) lap.at(idx_lo.at(e), static_cast<long>(j)) = c;
    }

    for (const auto& v : exact_nullspace(lap)) {
        HomogPoly p(num_vars, degree);
        for (size_t j = 0; j < mons.size(); ++j)
            if (v[j] != 0) p.coeffs[mons[j]] = v[j];
        basis.polys.push_back(std::move(p));
    }

    const long expect = harmonic_dimension(num_vars - 1, degree);
    if (static_cast<long>(basis.polys.size()) != expect)
        throw ComputeError("harmonic_basis: dimension mismatch against the binomial formula");
    for (const auto& p : basis.polys)
        if (!p.laplacian().is_zero()) throw ComputeError("harmonic_basis: basis polynomial is not harmonic");
    return basis;
}

struct RankCertificate {
    std::string map_name;  // "product" or "gradient"
    int n = 0;             // sphere dimension
    int ell = 0;
    long domain_dim = 0;
    long codomain_dim = 0;
    long rank = 0;
    long nullity = 0;
    bool exact = true;
};

namespace detail {

// Matrix of the symmetric product map: one row per pair alpha <= beta, columns
// over the degree-2l monomials.
inline ExactMatrix product_map_matrix(const HarmonicBasis& basis) {
    const int m = basis.size();
    const auto mons = monomials(basis.num_vars, 2 * basis.degree);
    const auto idx = monomial_index(mons);
    ExactMatrix mat(static_cast<long>(m) * (m + 1) / 2, static_cast<long>(mons.size()));
    long row = 0;
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) (basis.polys[a] * basis.polys[b]).write_coeffs(idx, mat, row++);
    return mat;
}

// One row per pair alpha <= beta; column blocks over coordinate pairs j <= k
// hold the symmetrized gradient products d_j u_a d_k u_b + d_j u_b d_k u_a.
inline ExactMatrix gradient_map_matrix(const HarmonicBasis& basis) {
    const int m = basis.size();
    const int nv = basis.num_vars;
    const auto mons = monomials(nv, 2 * basis.degree - 2);
    const auto idx = monomial_index(mons);
    const long block = static_cast<long>(mons.size());
    const long nblocks = static_cast<long>(nv) * (nv + 1) / 2;

    std::vector<std::vector<HomogPoly>> partials(m);
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < nv; ++j) partials[a].push_back(basis.polys[a].partial(j));

    ExactMatrix mat(static_cast<long>(m) * (m + 1) / 2, nblocks * block);
    long row = 0;
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b, ++row) {
            long blk = 0;
            for (int j = 0; j < nv; ++j)
                for (int k = j; k < nv; ++k, ++blk) {
                    const HomogPoly g = partials[a][j] * partials[b][k] + partials[b][j] * partials[a][k];
                    for (const auto& [e, c] : g.coeffs) mat.at(row, blk * block + idx.at(e)) = c;
                }
        }
    return mat;
}

}  // namespace detail

// Exact kernel dimension of the product map on sym^2 of the basis; a
// nontrivial kernel certifies a conformally degenerate sphere eigenvalue.
inline RankCertificate product_map_certificate(const HarmonicBasis& basis) {
    if (basis.degree < 1) throw ValidationError("product_map_certificate: degree must be >= 1");
    const ExactMatrix mat = detail::product_map_matrix(basis);
    RankCertificate c;
    c.map_name = "product";
    c.n = basis.num_vars - 1;
    c.ell = basis.degree;
    c.domain_dim = mat.rows();
    c.codomain_dim = mat.cols();
    c.rank = exact_rank(mat);
    c.nullity = c.domain_dim - c.rank;
    return c;
}

// Kernel vectors of the product map as packed pair coefficients (a <= b), for
// relation checks. Exact.
inline std::vector<std::vector<Rational>> product_map_kernel(const HarmonicBasis& basis) {
    return exact_nullspace(detail::product_map_matrix(basis).transpose());
}

inline RankCertificate gradient_map_certificate(const HarmonicBasis& basis, long cell_budget = 500000000L) {
    if (basis.degree < 1) throw ValidationError("gradient_map_certificate: degree must be >= 1");
    const int m = basis.size();
    const long domain = static_cast<long>(m) * (m + 1) / 2;
    const long nblocks = static_cast<long>(basis.num_vars) * (basis.num_vars + 1) / 2;
    const long codomain = nblocks * monomial_count(basis.num_vars, 2 * basis.degree - 2);
    if (domain * codomain > cell_budget)
        throw ResourceLimitError("gradient_map_certificate: " + std::to_string(domain) + " x " +
                                 std::to_string(codomain) + " exceeds cell budget " + std::to_string(cell_budget));
    const ExactMatrix mat = detail::gradient_map_matrix(basis);
    RankCertificate c;
    c.map_name = "gradient";
    c.n = basis.num_vars - 1;
    c.ell = basis.degree;
    c.domain_dim = domain;
    c.codomain_dim = codomain;
    c.rank = exact_rank(mat);
    c.nullity = c.domain_dim - c.rank;
    return c;
}

inline std::vector<std::vector<Rational>> gradient_map_kernel(const HarmonicBasis& basis) {
    return exact_nullspace(detail::gradient_map_matrix(basis).transpose());
}

struct S3DimensionCount {
    long long ell = 0;
    long long domain_dim = 0;            // dim sym^2 H_l(R^4)
    long long codomain_dim_times_10 = 0; // 10 * dim E_{2l-2}(R^4)
    bool kernel_guaranteed = false;
};

// Counting shortcut on S^3: the gradient-product map must have a kernel as
// soon as dim sym^2 H_l >= 10 dim E_{2l-2}.
inline S3DimensionCount s3_dimension_count(long long ell) {
    if (ell < 1) throw ValidationError("s3_dimension_count: ell must be positive");
    const long long h = (ell + 1) * (ell + 1);  // dim H_l(R^4)
    S3DimensionCount d;
    d.ell = ell;
    d.domain_dim = h * (h + 1) / 2;
    d.codomain_dim_times_10 = 10 * binomial(2 * ell + 1, 3);
    d.kernel_guaranteed = d.domain_dim >= d.codomain_dim_times_10;
    return d;
}

namespace detail {

// Legendre polynomials with exact rational coefficients; index = z power.
inline std::vector<Rational> legendre(int ell) {
    std::vector<std::vector<Rational>> p(ell + 1);
    p[0] = {Rational(1)};
    if (ell >= 1) p[1] = {Rational(0), Rational(1)};
    for (int k = 1; k < ell; ++k) {
        std::vector<Rational> next(k + 2, Rational(0));
        for (size_t i = 0; i < p[k].size(); ++i) next[i + 1] += Rational(2 * k + 1, k + 1) * p[k][i];
        for (size_t i = 0; i < p[k - 1].size(); ++i) next[i] -= Rational(k, k + 1) * p[k - 1][i];
        p[k + 1] = std::move(next);
    }
    return p[ell];
}

inline std::vector<Rational> poly_derivative(const std::vector<Rational>& a) {
    if (a.size() <= 1) return {Rational(0)};
    std::vector<Rational> d(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * static_cast<long>(i);
    return d;
}

inline std::vector<Rational> poly_square(const std::vector<Rational>& a) {
    std::vector<Rational> s(2 * a.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) s[i + j] += a[i] * a[j];
    return s;
}

}  // namespace detail

// Certifies that the l+1 products (x^2+y^2)^m Q_l^m(z)^2, m = 0..l, with
// Q_l^m = d^m P_l / dz^m, are linearly independent (normalization constants
// set to 1). Certificate for surjectivity of the product map onto the zonal
// subspace on S^2.
inline bool zonal_surjectivity_check(int ell) {
    if (ell < 1) throw ValidationError("zonal_surjectivity_check: ell must be positive");
    auto q = detail::legendre(ell);
    const long zcols = 2L * ell + 1;  // z powers 0..2l
    ExactMatrix mat(ell + 1, (ell + 1) * zcols);
    for (int m = 0; m <= ell; ++m) {
        if (m > 0) q = detail::poly_derivative(q);
        const auto q2 = detail::poly_square(q);
        for (size_t zp = 0; zp < q2.size(); ++zp)
            mat.at(m, static_cast<long>(m) * zcols + static_cast<long>(zp)) = q2[zp];
    }
    return exact_rank(mat) == ell + 1;
}

}  // namespace speclab
