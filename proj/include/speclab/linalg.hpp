#pragma once

// Dense symmetric linear algebra used throughout: packed symmetric storage,
// SVD-based null spaces with an explicit relative threshold, and symmetric /
// generalized symmetric eigensolvers (Eigen-backed).

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "speclab/common.hpp"

namespace speclab {

// Symmetric m x m matrix, stored packed for index pairs (a, b) with a <= b.
class SymMatrix {
public:
    explicit SymMatrix(int dim) : dim_(dim), packed_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
        if (dim <= 0) throw ValidationError("SymMatrix: dim must be positive");
    }

    static SymMatrix from_dense(const Matrix& d, double sym_tol = 1e-12) {
        if (d.rows() != d.cols()) throw ValidationError("SymMatrix::from_dense: not square");
        const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
        if ((d - d.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
            throw ValidationError("SymMatrix::from_dense: input not symmetric");
        SymMatrix s(static_cast<int>(d.rows()));
        for (int a = 0; a < s.dim_; ++a)
            for (int b = a; b < s.dim_; ++b) s.at(a, b) = 0.5 * (d(a, b) + d(b, a));
        return s;
    }

    int dim() const { return dim_; }
    int packed_size() const { return static_cast<int>(packed_.size()); }

    double& at(int a, int b) { return packed_[index(a, b)]; }
    double at(int a, int b) const { return packed_[index(a, b)]; }

    // Packed upper triangle in pair order (0,0),(0,1),...,(0,m-1),(1,1),...
    // Round-trips through devectorize exactly.
    Vector vectorize() const {
        Vector v(packed_size());
        for (int i = 0; i < packed_size(); ++i) v[i] = packed_[i];
        return v;
    }

    static SymMatrix devectorize(int dim, const Vector& v) {
        SymMatrix s(dim);
        if (v.size() != s.packed_size()) throw ValidationError("SymMatrix::devectorize: size mismatch");
        for (int i = 0; i < s.packed_size(); ++i) s.packed_[i] = v[i];
        return s;
    }

    // Isometric embedding into R^{m(m+1)/2}: off-diagonal entries scaled by
    // sqrt(2) so that dot(isovec(A), isovec(B)) == trace(A*B).
    Vector isovec() const {
        static const double rt2 = std::sqrt(2.0);
        Vector v(packed_size());
        int i = 0;
        for (int a = 0; a < dim_; ++a)
            for (int b = a; b < dim_; ++b) v[i++] = (a == b) ? at(a, b) : rt2 * at(a, b);
        return v;
    }

    static SymMatrix from_isovec(int dim, const Vector& v) {
        static const double rt2 = std::sqrt(2.0);
        SymMatrix s(dim);
        if (v.size() != s.packed_size()) throw ValidationError("SymMatrix::from_isovec: size mismatch");
        int i = 0;
        for (int a = 0; a < dim; ++a)
            for (int b = a; b < dim; ++b, ++i) s.at(a, b) = (a == b) ? v[i] : v[i] / rt2;
        return s;
    }

    Matrix dense() const {
        Matrix d(dim_, dim_);
        for (int a = 0; a < dim_; ++a)
            for (int b = a; b < dim_; ++b) d(a, b) = d(b, a) = at(a, b);
        return d;
    }

    double frobenius() const { return dense().norm(); }

private:
    size_t index(int a, int b) const {
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= dim_) throw ValidationError("SymMatrix: index out of range");
        return static_cast<size_t>(a) * dim_ - static_cast<size_t>(a) * (a + 1) / 2 + b;
    }

    int dim_;
    std::vector<double> packed_;
};

struct NullspaceResult {
    int nullity = 0;
    Matrix basis;            // cols x nullity, orthonormal columns
    Vector singular_values;  // nonincreasing
    double threshold_used = 0.0;
};

// Right null space of a rectangular matrix: nullity counts singular values
// sigma_i <= rel_tol * sigma_max (plus the cols - min(rows, cols) structural
// zeros). A zero matrix is treated as all-null.
inline NullspaceResult numerical_nullspace(const Matrix& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) throw ValidationError("numerical_nullspace: empty matrix");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("numerical_nullspace: rel_tol must be in (0,1)");
    if (!m.allFinite()) throw ValidationError("numerical_nullspace: NaN/Inf entry");

    const int cols = static_cast<int>(m.cols());
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;

    NullspaceResult r;
    r.threshold_used = rel_tol;
    r.singular_values = sv;
    if (smax == 0.0) {
        r.nullity = cols;
        r.basis = Matrix::Identity(cols, cols);
        return r;
    }
    int kept = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > rel_tol * smax) ++kept;
    r.nullity = cols - kept;
    r.basis = svd.matrixV().rightCols(r.nullity);
    return r;
}

struct SymEig {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // orthonormal columns
};

inline SymEig sym_eig(const SymMatrix& m) {
    const Matrix d = m.dense();
    if (!d.allFinite()) throw ValidationError("sym_eig: NaN/Inf entry");
    Eigen::SelfAdjointEigenSolver<Matrix> es(d);
    if (es.info() != Eigen::Success) throw ComputeError("sym_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

struct GenEig {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // B-orthonormal columns (V^T B V = I)
};

// Solves S v = nu B v for symmetric S and SPD B via the Cholesky reduction.
// Non-SPD mass is reported, not silently mangled.
inline GenEig generalized_sym_eig_full(const Matrix& s, const Matrix& b) {
    if (s.rows() != s.cols() || b.rows() != b.cols() || s.rows() != b.rows())
        throw ValidationError("generalized_sym_eig: dimension mismatch");
    if (!s.allFinite() || !b.allFinite()) throw ValidationError("generalized_sym_eig: NaN/Inf entry");
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success)
        throw ComputeError("generalized_sym_eig: mass matrix not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(s, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw ComputeError("generalized_sym_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

inline Vector generalized_sym_eig(const SymMatrix& stiffness, const SymMatrix& mass) {
    return generalized_sym_eig_full(stiffness.dense(), mass.dense()).eigenvalues;
}

}  // namespace speclab
