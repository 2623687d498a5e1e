#pragma once

// First-order eigenvalue perturbation machinery: the variation of the
// Laplace-Beltrami operator in a metric direction h, the m x m splitting
// matrix M(h)_{ab} = <u_a, D_h Lap u_b> assembled through two independent
// routes that must agree, the cokernel probe for the submersion property of
// the local defining map, and degeneracy classification from sampled
// eigenfunctions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/galerkin.hpp"
#include "speclab/grid.hpp"
#include "speclab/lattice.hpp"
#include "speclab/linalg.hpp"
#include "speclab/metric.hpp"
#include "speclab/rng.hpp"
#include "speclab/trig.hpp"

namespace speclab {

namespace detail {

// Raised components h^{jk} = g^{jm} g^{kn} h_{mn} for a constant-coefficient
// metric, as exact trig polynomials (packed j <= k).
inline std::vector<TrigPoly> raise_constant(const PerturbationTensor& h, const Matrix& ginv) {
    const int n = h.lattice.dim;
    std::vector<TrigPoly> out(static_cast<size_t>(n) * (n + 1) / 2, TrigPoly(n));
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            TrigPoly acc(n);
            for (int m = 0; m < n; ++m)
                for (int nn = m; nn < n; ++nn) {
                    const double c = (m == nn) ? ginv(j, m) * ginv(k, m)
                                               : ginv(j, m) * ginv(k, nn) + ginv(j, nn) * ginv(k, m);
                    acc.add_scaled(h.at(m, nn), c);
                }
            out[pair_index(j, k, n)] = std::move(acc);
        }
    return out;
}

// tr_g h for constant g
inline TrigPoly trace_constant(const PerturbationTensor& h, const Matrix& ginv) {
    const int n = h.lattice.dim;
    TrigPoly acc(n);
    for (int m = 0; m < n; ++m)
        for (int nn = m; nn < n; ++nn) acc.add_scaled(h.at(m, nn), (m == nn ? 1.0 : 2.0) * ginv(m, nn));
    return acc;
}

}  // namespace detail

// D_h Lap_g u as an exact trig polynomial; constant-coefficient metrics only.
// D_h Lap u = 1/2 d_j(tr_g h) g^{jk} d_k u - |g|^{-1/2} d_j(|g|^{1/2} h^{jk} d_k u)
// and the determinant factors cancel when g is constant.
inline TrigPoly variation_apply_trig(const MetricField& metric, const PerturbationTensor& h, const TrigPoly& u,
                                     const Matrix& dual) {
    if (!metric.is_constant()) throw ValidationError("variation_apply_trig: metric must be constant");
    const int n = metric.lattice.dim;
    const Matrix ginv = metric.constant_matrix().inverse();

    std::vector<TrigPoly> du;
    for (int k = 0; k < n; ++k) du.push_back(u.partial_x(k, dual));

    const TrigPoly trh = detail::trace_constant(h, ginv);
    TrigPoly term1(n);
    for (int j = 0; j < n; ++j) {
        TrigPoly vj(n);
        for (int k = 0; k < n; ++k) vj.add_scaled(du[k], ginv(j, k));
        term1 += trh.partial_x(j, dual) * vj;
    }

    const auto hr = detail::raise_constant(h, ginv);
    TrigPoly term2(n);
    for (int j = 0; j < n; ++j) {
        TrigPoly wj(n);
        for (int k = 0; k < n; ++k) wj += hr[detail::pair_index(j, k, n)] * du[k];
        term2 += wj.partial_x(j, dual);
    }

    TrigPoly out = term1.scaled(0.5);
    out.add_scaled(term2, -1.0);
    return out;
}

// D_h Lap_g u sampled on the grid. Constant metrics go through the exact trig
// route; otherwise pointwise fields with spectral derivatives.
inline Vector variation_apply(const MetricField& metric, const PerturbationTensor& h, const TrigPoly& u,
                              const Grid& grid, const MetricOnGrid* mg_opt = nullptr) {
    const int n = metric.lattice.dim;
    if (u.bandwidth_inf() > (grid.G - 1) / 2)
        throw ValidationError("variation_apply: input band exceeds the grid Nyquist range");
    if (metric.is_constant()) return sample(variation_apply_trig(metric, h, u, grid.dual), grid);

    MetricOnGrid local;
    if (!mg_opt) local = sample_metric(metric, grid);
    const MetricOnGrid& mg = mg_opt ? *mg_opt : local;
    SpectralCalc spec(grid);

    std::vector<Vector> du;
    for (int k = 0; k < n; ++k) du.push_back(sample(u.partial_x(k, grid.dual), grid));
    std::vector<Vector> h_vals;
    for (const auto& c : h.comp) h_vals.push_back(sample(c, grid));

    Vector trh = Vector::Zero(grid.nodes);
    for (int m = 0; m < n; ++m)
        for (int nn = m; nn < n; ++nn)
            trh.array() += (m == nn ? 1.0 : 2.0) * mg.ginv(m, nn).array() * h_vals[detail::pair_index(m, nn, n)].array();

    Vector term1 = Vector::Zero(grid.nodes);
    for (int j = 0; j < n; ++j) {
        Vector vj = Vector::Zero(grid.nodes);
        for (int k = 0; k < n; ++k) vj.array() += mg.ginv(j, k).array() * du[k].array();
        term1.array() += spec.partial(trh, j).array() * vj.array();
    }

    std::vector<Vector> w(n, Vector::Zero(grid.nodes));
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {  // raised h^{jk} pointwise, used symmetrically
            Vector hr = Vector::Zero(grid.nodes);
            for (int m = 0; m < n; ++m)
                for (int nn = m; nn < n; ++nn) {
                    const Vector& hv = h_vals[detail::pair_index(m, nn, n)];
                    Vector coeff = (m == nn)
                                       ? (mg.ginv(j, m).array() * mg.ginv(k, m).array()).matrix()
                                       : (mg.ginv(j, m).array() * mg.ginv(k, nn).array() +
                                          mg.ginv(j, nn).array() * mg.ginv(k, m).array())
                                             .matrix();
                    hr.array() += coeff.array() * hv.array();
                }
            w[j].array() += hr.array() * du[k].array();
            if (k != j) w[k].array() += hr.array() * du[j].array();
        }
        }
    for (int j = 0; j < n; ++j) w[j].array() *= mg.sqrt_det.array();
    Vector term2 = spec.divergence(w);
    term2.array() /= mg.sqrt_det.array();

    return 0.5 * term1 - term2;
}

struct SplittingMatrix {
    SymMatrix entries;  // tensor-formula value
    double path_disagreement = 0.0;
    double lambda = 0.0;
};

// M(h)_{ab} = <u_a, D_h Lap u_b>, assembled BOTH by the integrated-by-parts
// tensor formula
//   integral h^{jk} ( -1/2 g_jk (Lap u) v - 1/2 g_jk g(grad u, grad v)
//                     + [du (x) dv]_jk ) dmu
// and by direct pairing of u_a against D_h Lap u_b; the two must agree to
// 1e-9 relative or the call refuses (quadrature exactness violated).
inline SplittingMatrix splitting_matrix(const MetricField& metric, const EigenspaceBasis& basis,
                                        const PerturbationTensor& h, double agree_tol = 1e-9) {
    if (basis.trig.empty()) throw ValidationError("splitting_matrix: basis lacks the coefficient form");
    const int n = metric.lattice.dim;
    const int m = basis.m;
    const Grid& grid = basis.grid;
    const int band_needed = 2 * basis.bandwidth_inf() + std::max(h.bandwidth(), metric.bandwidth());
    if (grid.G <= band_needed)
        throw ComputeError("splitting_matrix: grid " + std::to_string(grid.G) +
                           " cannot integrate products of band " + std::to_string(band_needed) + " exactly");

    const bool constant = metric.is_constant();
    MetricOnGrid mg = sample_metric(metric, grid);

    // pointwise h components and raised h^{jk}
    std::vector<Vector> h_vals, hr_vals(static_cast<size_t>(n) * (n + 1) / 2);
    for (const auto& c : h.comp) h_vals.push_back(sample(c, grid));
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            Vector hr = Vector::Zero(grid.nodes);
            for (int mm = 0; mm < n; ++mm)
                for (int nn = mm; nn < n; ++nn) {
                    const Vector& hv = h_vals[detail::pair_index(mm, nn, n)];
                    if (mm == nn)
                        hr.array() += mg.ginv(j, mm).array() * mg.ginv(k, mm).array() * hv.array();
                    else
                        hr.array() += (mg.ginv(j, mm).array() * mg.ginv(k, nn).array() +
                                       mg.ginv(j, nn).array() * mg.ginv(k, mm).array()) *
                                      hv.array();
                }
            hr_vals[detail::pair_index(j, k, n)] = std::move(hr);
        }

    Vector trh = Vector::Zero(grid.nodes);
    for (int mm = 0; mm < n; ++mm)
        for (int nn = mm; nn < n; ++nn)
            trh.array() += (mm == nn ? 1.0 : 2.0) * mg.ginv(mm, nn).array() * h_vals[detail::pair_index(mm, nn, n)].array();

    // Lap u_a sampled (exact for constant g, spectral otherwise)
    Matrix lap_u(m, grid.nodes);
    for (int a = 0; a < m; ++a) lap_u.row(a) = laplacian_apply(metric, basis.trig[a], grid, &mg).transpose();

    const Vector wA = grid.weight * mg.sqrt_det.array();

    // tensor formula
    Matrix path_a;
    {
        const Vector w1 = (-0.5) * wA.array() * trh.array();
        path_a = (lap_u.array().rowwise() * w1.transpose().array()).matrix() * basis.values.transpose();
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                const Vector w2 = (-0.5) * wA.array() * trh.array() * mg.ginv(j, k).array() +
                                  wA.array() * hr_vals[detail::pair_index(j, k, n)].array();
                const Matrix block =
                    (basis.partials[j].array().rowwise() * w2.transpose().array()).matrix() * basis.partials[k].transpose();
                path_a += (j == k) ? block : Matrix(block + block.transpose());
            }
        path_a = 0.5 * (path_a + path_a.transpose()).eval();
    }

    // direct pairing
    Matrix path_b(m, m);
    if (constant) {
        const double sd0 = mg.sqrt_det[0];
        const double vol = metric.lattice.covolume();
        std::vector<TrigPoly> var;
        for (int b = 0; b < m; ++b) var.push_back(variation_apply_trig(metric, h, basis.trig[b], grid.dual));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) path_b(a, b) = sd0 * basis.trig[a].inner(var[b], vol);
    } else {
        Matrix var_vals(m, grid.nodes);
        for (int b = 0; b < m; ++b)
            var_vals.row(b) = variation_apply(metric, h, basis.trig[b], grid, &mg).transpose();
        path_b = (basis.values.array().rowwise() * wA.transpose().array()).matrix() * var_vals.transpose();
    }

    const double scale = std::max({1.0, path_a.norm(), std::abs(basis.lambda)});
    const double disagreement = (path_a - 0.5 * (path_b + path_b.transpose())).cwiseAbs().maxCoeff();
    if (disagreement > agree_tol * scale)
        throw ComputeError("splitting_matrix: dual assembly paths disagree by " + std::to_string(disagreement) +
                           " (scale " + std::to_string(scale) + "); quadrature exactness violated");

    return {SymMatrix::from_dense(path_a, 1e-9), disagreement, basis.lambda};
}

// Basis change v_b = sum_a q(a,b) u_a; spectra of splitting matrices must be
// invariant under orthogonal q.
inline EigenspaceBasis transform_basis(const EigenspaceBasis& basis, const Matrix& q) {
    if (q.rows() != basis.m || q.cols() != basis.m) throw ValidationError("transform_basis: shape mismatch");
    EigenspaceBasis out = basis;
    out.values = q.transpose() * basis.values;
    for (size_t j = 0; j < basis.partials.size(); ++j) out.partials[j] = q.transpose() * basis.partials[j];
    out.gram = q.transpose() * basis.gram * q;
    out.trig.clear();
    for (int b = 0; b < basis.m; ++b) {
        TrigPoly acc(basis.grid.n());
        for (int a = 0; a < basis.m; ++a) acc.add_scaled(basis.trig[a], q(a, b));
        out.trig.push_back(std::move(acc));
    }
    return out;
}

// Seeded band-limited random direction; frequencies |kappa| <= band, standard
// normal coefficients, optionally normalized to unit sup operator norm.
inline PerturbationTensor random_perturbation(const MetricField& metric, bool conformal, double band, Rng& rng,
                                              bool normalize = true) {
    const Lattice& lat = metric.lattice;
    const int n = lat.dim;
    std::vector<FreqKey> freqs;
    freqs.push_back(FreqKey(n, 0));
    for (const auto& shell : enumerate_spectrum(lat, band * band))
        for (const auto& nu : shell.rep_coeffs) freqs.push_back(FreqKey(nu.data(), nu.data() + n));

    auto random_scalar = [&]() {
        TrigPoly f(n);
        for (const auto& key : freqs) {
            bool zero = true;
            for (int x : key)
                if (x) { zero = false; break; }
            f.add(key, rng.normal(), zero ? 0.0 : rng.normal());
        }
        return f;
    };

    PerturbationTensor h(lat);
    if (conformal) {
        h = PerturbationTensor::conformal_from(random_scalar(), metric);
    } else {
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) h.at(j, k) = random_scalar();
    }

    if (normalize) {
        Grid probe(lat, 4 * std::max(1, h.bandwidth()) + 3);
        std::vector<Vector> vals;
        for (const auto& c : h.comp) vals.push_back(sample(c, probe));
        double sup = 0.0;
        Matrix hx(n, n);
        for (long node = 0; node < probe.nodes; ++node) {
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k) hx(j, k) = hx(k, j) = vals[detail::pair_index(j, k, n)][node];
            sup = std::max(sup, hx.cwiseAbs().rowwise().sum().maxCoeff());
        }
        if (sup > 0.0) h = h.scaled(1.0 / sup);
    }
    return h;
}

struct FirstOrderReport {
    std::vector<double> t;
    std::vector<std::vector<double>> predicted;  // sorted cluster model lambda + t sigma(M)
    std::vector<std::vector<double>> actual;     // sorted Galerkin cluster
    std::vector<double> deviation;               // max abs mismatch per t
    double slope = std::numeric_limits<double>::quiet_NaN();
    double lambda = 0.0;
    int m = 0;
    double path_disagreement = 0.0;
};

namespace detail {

// m eigenvalues nearest lambda, with an isolation check against the rest
inline std::vector<double> cluster_near(const Vector& lambdas, double lambda, int m, const std::string& what) {
    const int total = static_cast<int>(lambdas.size());
    if (total < m) throw ComputeError("cluster_near: spectrum smaller than the cluster");
    std::vector<int> order(total);
    for (int i = 0; i < total; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(lambdas[a] - lambda) < std::abs(lambdas[b] - lambda); });
    double r_in = 0.0;
    std::vector<double> chosen;
    for (int i = 0; i < m; ++i) {
        chosen.push_back(lambdas[order[i]]);
        r_in = std::max(r_in, std::abs(lambdas[order[i]] - lambda));
    }
    if (total > m) {
        const double r_out = std::abs(lambdas[order[m]] - lambda);
        if (r_out < std::max(2.0 * r_in, 1e-12 * (1.0 + std::abs(lambda))))
            throw ComputeError("cluster merged with neighbors " + what);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace detail

// Checks the first-order model: the cluster of Lap_{g+th} near lambda should
// match lambda + t sigma(M(h)) up to O(t^2), i.e. a log-log slope of about 2.
inline FirstOrderReport first_order_validation(const MetricField& metric, const EigenspaceBasis& basis,
                                               const PerturbationTensor& h, const std::vector<double>& t_grid,
                                               double max_freq, int grid_size = 0) {
    for (double t : t_grid)
        if (t < 0.0) throw ValidationError("first_order_validation: t values must be nonnegative");

    const SplittingMatrix sm = splitting_matrix(metric, basis, h);
    const Vector mu = sym_eig(sm.entries).eigenvalues;

    FirstOrderReport rep;
    rep.lambda = basis.lambda;
    rep.m = basis.m;
    rep.path_disagreement = sm.path_disagreement;

    for (double t : t_grid) {
        const MetricField gt = metric.plus_scaled(h, t);
        const SpectrumSlice slice = spectrum(gt, max_freq, std::nullopt, grid_size);
        const std::vector<double> actual =
            detail::cluster_near(slice.eigenvalues, basis.lambda, basis.m, "at t=" + std::to_string(t));
        std::vector<double> predicted;
        for (int i = 0; i < basis.m; ++i) predicted.push_back(basis.lambda + t * mu[i]);
        std::sort(predicted.begin(), predicted.end());
        double dev = 0.0;
        for (int i = 0; i < basis.m; ++i) dev = std::max(dev, std::abs(predicted[i] - actual[i]));
        rep.t.push_back(t);
        rep.predicted.push_back(std::move(predicted));
        rep.actual.push_back(actual);
        rep.deviation.push_back(dev);
    }

    // least-squares slope of log deviation vs log t over the positive samples
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int np = 0;
    for (size_t i = 0; i < rep.t.size(); ++i) {
        if (rep.t[i] <= 0.0 || rep.deviation[i] <= 0.0) continue;
        const double x = std::log(rep.t[i]), y = std::log(rep.deviation[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++np;
    }
    if (np >= 2) rep.slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    return rep;
}

enum class SahMode { Full, Conformal };

struct SAHReport {
    SahMode mode = SahMode::Full;
    std::vector<SymMatrix> cokernel;  // matrices A with <A, M(h)> = 0 for all sampled h
    double residual_max = 0.0;        // max |tr(A M(h))| / (|A| |M(h)|)
    bool sah_fails = false;
    int num_directions = 0;
    std::uint64_t seed = 0;
    double rel_tol = 0.0;
    Vector singular_values;
    double max_path_disagreement = 0.0;
};

// Spans the image of h -> M(h) over seeded random band-limited directions and
// extracts its orthogonal complement inside symmetric m x m matrices. A
// nonempty complement is exactly a failure of the submersion property.
inline SAHReport sah_cokernel_test(const MetricField& metric, const EigenspaceBasis& basis, SahMode mode,
                                   int num_directions, std::uint64_t seed, double rel_tol = 1e-8,
                                   double direction_band = 3.0) {
    const int m = basis.m;
    const int pair_dim = m * (m + 1) / 2;
    if (num_directions < pair_dim)
        throw ValidationError("sah_cokernel_test: need at least m(m+1)/2 = " + std::to_string(pair_dim) +
                              " directions to certify a submersion, got " + std::to_string(num_directions));

    Rng rng(seed);
    std::vector<SymMatrix> mats;
    Matrix rows(num_directions, pair_dim);
    double max_dis = 0.0;
    for (int d = 0; d < num_directions; ++d) {
        const PerturbationTensor h = random_perturbation(metric, mode == SahMode::Conformal, direction_band, rng);
        const SplittingMatrix sm = splitting_matrix(metric, basis, h);
        max_dis = std::max(max_dis, sm.path_disagreement);
        rows.row(d) = sm.entries.isovec().transpose();
        mats.push_back(sm.entries);
    }

    const NullspaceResult ns = numerical_nullspace(rows, rel_tol);

    SAHReport rep;
    rep.mode = mode;
    rep.num_directions = num_directions;
    rep.seed = seed;
    rep.rel_tol = rel_tol;
    rep.singular_values = ns.singular_values;
    rep.max_path_disagreement = max_dis;
    for (int c = 0; c < ns.nullity; ++c) {
        const SymMatrix a = SymMatrix::from_isovec(m, ns.basis.col(c));
        double worst = 0.0;
        const double na = a.dense().norm();
        for (const auto& mh : mats) {
            const double nm = mh.dense().norm();
            if (nm == 0.0) continue;
            worst = std::max(worst, std::abs((a.dense() * mh.dense()).trace()) / (na * nm));
        }
        rep.residual_max = std::max(rep.residual_max, worst);
        rep.cokernel.push_back(a);
    }
    rep.sah_fails = !rep.cokernel.empty();
    return rep;
}

namespace detail {

// nodes x pairs matrix of (2 - delta_ab) u_a u_b columns; null vectors are
// packed coefficient matrices A
inline Matrix product_relation_matrix(const EigenspaceBasis& b) {
    const int pairs = b.m * (b.m + 1) / 2;
    Matrix p(b.grid.nodes, pairs);
    int col = 0;
    for (int a = 0; a < b.m; ++a)
        for (int c = a; c < b.m; ++c, ++col)
            p.col(col) = (a == c ? 1.0 : 2.0) * (b.values.row(a).array() * b.values.row(c).array()).transpose();
    const double scale = p.cwiseAbs().maxCoeff();
    if (scale > 0) p /= scale;
    return p;
}

inline Matrix gradient_relation_matrix(const EigenspaceBasis& b) {
    const int n = b.grid.n();
    const int pairs = b.m * (b.m + 1) / 2;
    const int nblocks = n * (n + 1) / 2;
    Matrix g(b.grid.nodes * nblocks, pairs);
    int blk = 0;
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k, ++blk) {
            int col = 0;
            for (int a = 0; a < b.m; ++a)
                for (int c = a; c < b.m; ++c, ++col) {
                    Vector sym = 0.5 * (b.partials[j].row(a).array() * b.partials[k].row(c).array() +
                                        b.partials[j].row(c).array() * b.partials[k].row(a).array())
                                           .transpose();
                    g.block(blk * b.grid.nodes, col, b.grid.nodes, 1) = (a == c ? 1.0 : 2.0) * sym;
                }
            auto block = g.middleRows(blk * b.grid.nodes, b.grid.nodes);
            const double scale = block.cwiseAbs().maxCoeff();
            if (scale > 0) block /= scale;
        }
    return g;
}

}  // namespace detail

inline NullspaceResult product_relation_nullspace(const EigenspaceBasis& basis, double rel_tol) {
    return numerical_nullspace(detail::product_relation_matrix(basis), rel_tol);
}

inline NullspaceResult gradient_relation_nullspace(const EigenspaceBasis& basis, double rel_tol) {
    return numerical_nullspace(detail::gradient_relation_matrix(basis), rel_tol);
}

// Degeneracy classification straight from grid samples: k_c counts relations
// A^{ab} u_a u_b = 0, k_f additionally requires A^{ab} du_a du_b = 0.
inline DegeneracyReport classify_from_samples(const EigenspaceBasis& basis, double rel_tol) {
    if ((basis.gram - Matrix::Identity(basis.m, basis.m)).cwiseAbs().maxCoeff() > 1e-6)
        throw ValidationError("classify_from_samples: basis is not orthonormal (Gram deviation > 1e-6)");

    const Matrix p = detail::product_relation_matrix(basis);
    const NullspaceResult conf = numerical_nullspace(p, rel_tol);

    const Matrix g = detail::gradient_relation_matrix(basis);
    Matrix stacked(p.rows() + g.rows(), p.cols());
    stacked << p, g;
    const NullspaceResult full = numerical_nullspace(stacked, rel_tol);

    DegeneracyReport rep;
    rep.k_c = conf.nullity;
    rep.k_f = full.nullity;
    rep.classification = rep.k_f >= 1 ? Degeneracy::Degenerate
                       : rep.k_c >= 1 ? Degeneracy::ConformallyDegenerate
                                      : Degeneracy::Nondegenerate;
    for (int c = 0; c < full.nullity; ++c)
        rep.matrix_witnesses.push_back(SymMatrix::devectorize(basis.m, full.basis.col(c)));
    for (int c = 0; c < conf.nullity; ++c)
        rep.conformal_witnesses.push_back(conf.basis.col(c));
    return rep;
}

struct Prop27Report {
    int gradient_nullity = 0;
    double witness_residual_max = 0.0;  // max-norm of sum A^{ab} u_a u_b over gradient-relation witnesses
    double scale = 0.0;                 // max_a ||u_a||_inf^2
    double random_residual_min = std::numeric_limits<double>::infinity();
    int trials = 0;
    std::uint64_t seed = 0;
};

// Every solution of the gradient relation must also satisfy the function
// relation; random non-solutions must visibly fail it.
inline Prop27Report prop27_property_test(const EigenspaceBasis& basis, int trials, std::uint64_t seed,
                                         double rel_tol = 1e-8) {
    const NullspaceResult grad = gradient_relation_nullspace(basis, rel_tol);
    Prop27Report rep;
    rep.gradient_nullity = grad.nullity;
    rep.trials = trials;
    rep.seed = seed;

    double scale = 0.0;
    for (int a = 0; a < basis.m; ++a) scale = std::max(scale, basis.values.row(a).cwiseAbs().maxCoeff());
    rep.scale = scale * scale;

    const int pairs = basis.m * (basis.m + 1) / 2;
    auto relation_residual = [&](const Vector& packed) {
        Vector f = Vector::Zero(basis.grid.nodes);
        int col = 0;
        for (int a = 0; a < basis.m; ++a)
            for (int c = a; c < basis.m; ++c, ++col)
                f.array() += packed[col] * (a == c ? 1.0 : 2.0) *
                             (basis.values.row(a).array() * basis.values.row(c).array()).transpose();
        return f.cwiseAbs().maxCoeff();
    };

    for (int c = 0; c < grad.nullity; ++c)
        rep.witness_residual_max = std::max(rep.witness_residual_max, relation_residual(grad.basis.col(c)));

    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Vector v(pairs);
        for (int i = 0; i < pairs; ++i) v[i] = rng.normal();
        if (grad.nullity > 0) v -= grad.basis * (grad.basis.transpose() * v);  // push out of the witness span
        if (v.norm() == 0.0) continue;
        v /= v.norm();
        rep.random_residual_min = std::min(rep.random_residual_min, relation_residual(v));
    }
    return rep;
}

}  // namespace speclab
