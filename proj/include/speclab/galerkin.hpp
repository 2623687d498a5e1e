#pragma once

// Fourier-Galerkin discretization of the Laplace-Beltrami operator for smooth
// metrics on R^n / Lambda. Real trig basis {1, cos 2 pi kappa x, sin ...} over
// dual frequencies |kappa| <= max_freq; stiffness and mass assembled by
// trapezoidal quadrature on a uniform periodic grid sized so the band-limited
// part of every integrand is integrated exactly. The computed spectra are the
// ground truth that the perturbation experiments are checked against.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/grid.hpp"
#include "speclab/lattice.hpp"
#include "speclab/linalg.hpp"
#include "speclab/metric.hpp"
#include "speclab/trig.hpp"

namespace speclab {

struct GalerkinBasis {
    Lattice lattice;
    double max_freq = 0.0;
    std::vector<IntVector> pair_freqs;   // one per antipodal pair, shells ascending
    std::vector<double> pair_norm_sq;

    // mode 0 is the constant; mode 2p+1 = cos pair p, mode 2p+2 = sin pair p
    int num_modes() const { return 1 + 2 * static_cast<int>(pair_freqs.size()); }

    int bandwidth_inf() const {
        int b = 0;
        for (const auto& nu : pair_freqs) b = std::max(b, nu.cwiseAbs().maxCoeff());
        return b;
    }

    TrigPoly mode_poly(int a) const {
        const int n = lattice.dim;
        if (a == 0) return TrigPoly::constant(n, 1.0);
        const IntVector& nu = pair_freqs[(a - 1) / 2];
        FreqKey key(nu.data(), nu.data() + n);
        return (a - 1) % 2 == 0 ? TrigPoly::mode(key, 1.0, 0.0) : TrigPoly::mode(key, 0.0, 1.0);
    }
};

inline GalerkinBasis build_basis(const Lattice& lattice, double max_freq, int mode_cap = 2000) {
    if (!(max_freq > 0)) throw ValidationError("build_basis: max_freq must be positive");
    GalerkinBasis b;
    b.lattice = lattice;
    b.max_freq = max_freq;
    for (const auto& shell : enumerate_spectrum(lattice, max_freq * max_freq))
        for (size_t i = 0; i < shell.rep_coeffs.size(); ++i) {
            b.pair_freqs.push_back(shell.rep_coeffs[i]);
            b.pair_norm_sq.push_back(shell.norm_sq);
        }
    if (b.num_modes() > mode_cap)
        throw ResourceLimitError("build_basis: " + std::to_string(b.num_modes()) + " modes exceed cap " +
                                 std::to_string(mode_cap));
    return b;
}

// Minimal admissible grid: G >= 2 (2 max-mode-band + metric band) + 1, in
// integer sup-norm dual coordinates. The default doubles it (and stays odd).
inline int required_grid(const GalerkinBasis& basis, int metric_bandwidth) {
    return 2 * (2 * basis.bandwidth_inf() + metric_bandwidth) + 1;
}

inline int default_grid(const GalerkinBasis& basis, int metric_bandwidth) {
    return 2 * required_grid(basis, metric_bandwidth) + 1;
}

// modes x nodes value table
inline Matrix mode_values(const GalerkinBasis& basis, const Grid& grid) {
    Matrix c(basis.num_modes(), grid.nodes);
    for (int a = 0; a < basis.num_modes(); ++a) c.row(a) = sample(basis.mode_poly(a), grid).transpose();
    return c;
}

// modes x nodes table of d/dx_j
inline Matrix mode_partials(const GalerkinBasis& basis, const Grid& grid, int j) {
    Matrix d(basis.num_modes(), grid.nodes);
    for (int a = 0; a < basis.num_modes(); ++a)
        d.row(a) = sample(basis.mode_poly(a).partial_x(j, grid.dual), grid).transpose();
    return d;
}

struct Assembled {
    SymMatrix stiffness;
    SymMatrix mass;
    GalerkinBasis basis;
    Grid grid;
};

inline Assembled assemble(const MetricField& metric, double max_freq, int grid_size = 0, int mode_cap = 2000) {
    metric.lattice.validate();
    GalerkinBasis basis = build_basis(metric.lattice, max_freq, mode_cap);
    const int gmin = required_grid(basis, metric.bandwidth());
    if (grid_size == 0) grid_size = default_grid(basis, metric.bandwidth());
    if (grid_size < gmin)
        throw ValidationError("assemble: grid " + std::to_string(grid_size) + " below required " +
                              std::to_string(gmin));
    Grid grid(metric.lattice, grid_size);
    const MetricOnGrid mg = sample_metric(metric, grid);

    const int n = metric.lattice.dim;
    const Vector wsd = grid.weight * mg.sqrt_det.array();

    const Matrix c = mode_values(basis, grid);
    Matrix mass_d = (c.array().rowwise() * wsd.transpose().array()).matrix() * c.transpose();

    std::vector<Matrix> dj;
    for (int j = 0; j < n; ++j) dj.push_back(mode_partials(basis, grid, j));
    Matrix stiff_d = Matrix::Zero(basis.num_modes(), basis.num_modes());
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            const Vector wjk = wsd.array() * mg.ginv(j, k).array();
            const Matrix block = (dj[j].array().rowwise() * wjk.transpose().array()).matrix() * dj[k].transpose();
            if (j == k)
                stiff_d += block;
            else
                stiff_d += block + block.transpose();
        }

    mass_d = 0.5 * (mass_d + mass_d.transpose()).eval();
    stiff_d = 0.5 * (stiff_d + stiff_d.transpose()).eval();
    return {SymMatrix::from_dense(stiff_d), SymMatrix::from_dense(mass_d), std::move(basis), grid};
}

struct SpectrumSlice {
    Vector eigenvalues;  // lambda_0 = 0 first, then increasingly negative
    int basis_size = 0;
    std::optional<std::pair<double, double>> window;
};

inline SpectrumSlice spectrum(const MetricField& metric, double max_freq,
                              std::optional<std::pair<double, double>> window = std::nullopt, int grid_size = 0,
                              int mode_cap = 2000) {
    const Assembled a = assemble(metric, max_freq, grid_size, mode_cap);
    const Vector nu = generalized_sym_eig(a.stiffness, a.mass);
    std::vector<double> lam;
    for (int i = 0; i < nu.size(); ++i) {
        const double l = -nu[i];
        if (window && (l < window->first || l > window->second)) continue;
        lam.push_back(l);
    }
    SpectrumSlice s;
    s.basis_size = a.basis.num_modes();
    s.window = window;
    s.eigenvalues = Eigen::Map<Vector>(lam.data(), static_cast<long>(lam.size()));
    return s;
}

// Band-limited eigenbasis of one eigenvalue cluster, sampled on a grid
// together with its coordinate partials (exact from the trig coefficients).
struct EigenspaceBasis {
    enum class Rep { TorusFrequency, Polynomial, GridSamples };
    Rep representation = Rep::GridSamples;

    double lambda = 0.0;
    int m = 0;
    Grid grid;
    std::vector<TrigPoly> trig;    // exact coefficient form, size m
    Matrix values;                 // m x nodes
    std::vector<Matrix> partials;  // n matrices, each m x nodes
    Matrix gram;                   // w.r.t. dmu_g, identity up to tolerance
    double eigen_residual = 0.0;   // max_a ||(Lap - lambda) u_a|| / (|lambda| ||u_a||)

    int bandwidth_inf() const {
        int b = 0;
        for (const auto& t : trig) b = std::max(b, t.bandwidth_inf());
        return b;
    }
};

// (Lap_g u) sampled on the grid. Exact for constant-coefficient metrics;
// spectral (DFT) otherwise.
inline Vector laplacian_apply(const MetricField& metric, const TrigPoly& u, const Grid& grid,
                              const MetricOnGrid* mg_opt = nullptr) {
    const int n = metric.lattice.dim;
    if (metric.is_constant()) {
        const Matrix ginv = metric.constant_matrix().inverse();
        TrigPoly out(n);
        for (const auto& [nu, cs] : u.terms()) {
            Vector kappa = Vector::Zero(n);
            for (int i = 0; i < n; ++i) kappa += grid.dual.col(i) * nu[i];
            const double factor = -4.0 * kPi * kPi * kappa.dot(ginv * kappa);
            out.add(nu, factor * cs[0], factor * cs[1]);
        }
        return sample(out, grid);
    }
    MetricOnGrid local;
    if (!mg_opt) local = sample_metric(metric, grid);
    const MetricOnGrid& mg = mg_opt ? *mg_opt : local;
    SpectralCalc spec(grid);
    std::vector<Vector> du;
    for (int k = 0; k < n; ++k) du.push_back(sample(u.partial_x(k, grid.dual), grid));
    std::vector<Vector> w(n, Vector::Zero(grid.nodes));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) w[j].array() += mg.ginv(j, k).array() * du[k].array();
        w[j].array() *= mg.sqrt_det.array();
    }
    Vector div = spec.divergence(w);
    div.array() /= mg.sqrt_det.array();
    return div;
}

namespace detail {

inline void fill_samples(EigenspaceBasis& b) {
    const int n = b.grid.n();
    b.values.resize(b.m, b.grid.nodes);
    b.partials.assign(n, Matrix(b.m, b.grid.nodes));
    for (int a = 0; a < b.m; ++a) {
        b.values.row(a) = sample(b.trig[a], b.grid).transpose();
        for (int j = 0; j < n; ++j) b.partials[j].row(a) = sample(b.trig[a].partial_x(j, b.grid.dual), b.grid).transpose();
    }
}

inline void fill_gram_and_residual(EigenspaceBasis& b, const MetricField& metric, double residual_tol) {
    const MetricOnGrid mg = sample_metric(metric, b.grid);
    const Vector wsd = b.grid.weight * mg.sqrt_det.array();
    b.gram = (b.values.array().rowwise() * wsd.transpose().array()).matrix() * b.values.transpose();

    double worst = 0.0;
    for (int a = 0; a < b.m; ++a) {
        const Vector lap = laplacian_apply(metric, b.trig[a], b.grid, &mg);
        const Vector res = lap - b.lambda * b.values.row(a).transpose();
        const double rnorm = std::sqrt((res.array().square() * wsd.array()).sum());
        const double unorm = std::sqrt((b.values.row(a).transpose().array().square() * wsd.array()).sum());
        worst = std::max(worst, rnorm / (std::abs(b.lambda) * unorm));
    }
    b.eigen_residual = worst;
    if (worst > residual_tol)
        throw ComputeError("eigenspace basis residual " + std::to_string(worst) + " exceeds " +
                           std::to_string(residual_tol));
}

}  // namespace detail

// Exact eigenbasis of a flat shell: sqrt(2/(V sqrt|g0|)) cos / sin pairs over
// the antipodal representatives, orthonormal w.r.t. dmu_g.
inline EigenspaceBasis flat_eigenbasis(const MetricField& metric, const TorusEigenvalue& eig, int grid_size) {
    if (!metric.is_constant()) throw ValidationError("flat_eigenbasis: metric must be constant");
    const int n = metric.lattice.dim;
    const Matrix g0 = metric.constant_matrix();
    const double vol_g = metric.lattice.covolume() * std::sqrt(g0.determinant());

    EigenspaceBasis b;
    b.representation = EigenspaceBasis::Rep::TorusFrequency;
    b.grid = Grid(metric.lattice, grid_size);
    b.m = 2 * static_cast<int>(eig.rep_coeffs.size());
    const double amp = std::sqrt(2.0 / vol_g);

    const Matrix ginv = g0.inverse();
    double lam = 0.0;
    for (size_t p = 0; p < eig.rep_coeffs.size(); ++p) {
        const IntVector& nu = eig.rep_coeffs[p];
        FreqKey key(nu.data(), nu.data() + n);
        b.trig.push_back(TrigPoly::mode(key, amp, 0.0));
        b.trig.push_back(TrigPoly::mode(key, 0.0, amp));
        Vector kappa = Vector::Zero(n);
        for (int i = 0; i < n; ++i) kappa += b.grid.dual.col(i) * nu[i];
        lam = -4.0 * kPi * kPi * kappa.dot(ginv * kappa);
    }
    b.lambda = lam;
    detail::fill_samples(b);
    detail::fill_gram_and_residual(b, metric, 1e-12);
    return b;
}

// Orthonormalized basis of the multiplicity-cluster nearest lambda_target,
// sampled on an output grid. Cluster linkage at relative 1e-6; requires the
// cluster isolated from the rest of the spectrum by 10x its width.
inline EigenspaceBasis eigenspace_samples(const MetricField& metric, double max_freq, double lambda_target,
                                          int mult_expected, int out_grid, int solve_grid = 0,
                                          double cluster_rel_tol = 1e-6, double residual_tol = 1e-6) {
    const Assembled a = assemble(metric, max_freq, solve_grid);
    const GenEig ge = generalized_sym_eig_full(a.stiffness.dense(), a.mass.dense());
    const Vector nu = ge.eigenvalues;
    const int total = static_cast<int>(nu.size());

    std::vector<std::pair<int, int>> clusters;  // [first, last] inclusive
    int start = 0;
    for (int i = 1; i <= total; ++i) {
        if (i == total || std::abs(nu[i] - nu[i - 1]) > cluster_rel_tol * std::max(1.0, std::abs(nu[i - 1]))) {
            clusters.push_back({start, i - 1});
            start = i;
        }
    }

    int best = -1;
    double best_dist = 0.0;
    for (size_t ci = 0; ci < clusters.size(); ++ci) {
        const double mean = -0.5 * (nu[clusters[ci].first] + nu[clusters[ci].second]);
        const double dist = std::abs(mean - lambda_target);
        if (best < 0 || dist < best_dist) {
            best = static_cast<int>(ci);
            best_dist = dist;
        }
    }
    if (best < 0) throw ComputeError("eigenspace_samples: empty spectrum");
    const auto [lo, hi] = clusters[best];
    const int found = hi - lo + 1;
    if (found != mult_expected) {
        std::string sizes;
        for (const auto& c : clusters) sizes += std::to_string(c.second - c.first + 1) + " ";
        throw ComputeError("eigenspace_samples: cluster near lambda_target has dimension " + std::to_string(found) +
                           ", expected " + std::to_string(mult_expected) + "; cluster sizes: " + sizes);
    }
    const double width = nu[hi] - nu[lo];
    double gap = std::numeric_limits<double>::infinity();
    if (lo > 0) gap = std::min(gap, nu[lo] - nu[lo - 1]);
    if (hi + 1 < total) gap = std::min(gap, nu[hi + 1] - nu[hi]);
    if (gap < 10.0 * std::max(width, 1e-14 * std::max(1.0, std::abs(nu[hi]))))
        throw ComputeError("eigenspace_samples: cluster not isolated (gap " + std::to_string(gap) + ", width " +
                           std::to_string(width) + ")");

    EigenspaceBasis b;
    b.representation = EigenspaceBasis::Rep::GridSamples;
    b.grid = Grid(metric.lattice, out_grid);
    b.m = mult_expected;
    b.lambda = -0.5 * (nu[lo] + nu[hi]);
    for (int c = lo; c <= hi; ++c) {
        TrigPoly u(metric.lattice.dim);
        for (int mode = 0; mode < a.basis.num_modes(); ++mode) {
            const double w = ge.eigenvectors(mode, c);
            if (w == 0.0) continue;
            if (mode == 0) {
                u += TrigPoly::constant(metric.lattice.dim, w);
            } else {
                const IntVector& f = a.basis.pair_freqs[(mode - 1) / 2];
                FreqKey key(f.data(), f.data() + metric.lattice.dim);
                u += (mode - 1) % 2 == 0 ? TrigPoly::mode(key, w, 0.0) : TrigPoly::mode(key, 0.0, w);
            }
        }
        b.trig.push_back(std::move(u));
    }
    detail::fill_samples(b);
    detail::fill_gram_and_residual(b, metric, residual_tol);
    return b;
}

}  // namespace speclab
