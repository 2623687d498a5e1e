#pragma once

// Uniform periodic quadrature grid on the fundamental domain, in lattice
// coordinates y in [0,1)^n with x = B y. Trapezoidal weights are exact for
// band-limited integrands below the grid Nyquist. Spectral derivatives go
// through per-axis DFTs with centered integer frequencies.

#include <complex>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/lattice.hpp"
#include "speclab/trig.hpp"

namespace speclab {

struct Grid {
    Lattice lattice;
    Matrix dual;  // columns of the dual basis
    int G = 0;
    long nodes = 0;
    double weight = 0.0;  // covolume / G^n

    Grid() = default;
    Grid(const Lattice& lat, int size) : lattice(lat), dual(dual_lattice(lat).basis), G(size) {
        if (size < 2) throw ValidationError("Grid: size must be >= 2");
        nodes = 1;
        for (int i = 0; i < lat.dim; ++i) nodes *= size;
        weight = lat.covolume() / static_cast<double>(nodes);
    }

    int n() const { return lattice.dim; }

    void decode(long node, std::vector<int>& idx) const {
        for (int d = n() - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(node % G);
            node /= G;
        }
    }

    Vector y(long node) const {
        std::vector<int> idx(n());
        decode(node, idx);
        Vector v(n());
        for (int d = 0; d < n(); ++d) v[d] = static_cast<double>(idx[d]) / G;
        return v;
    }
};

// Samples a trig polynomial on every node. Phases reduce mod G, so a single
// cos/sin table covers all terms exactly.
inline Vector sample(const TrigPoly& p, const Grid& grid) {
    const int n = grid.n(), G = grid.G;
    Vector out = Vector::Zero(grid.nodes);
    std::vector<double> cos_t(G), sin_t(G);
    for (int t = 0; t < G; ++t) {
        cos_t[t] = std::cos(kTwoPi * t / G);
        sin_t[t] = std::sin(kTwoPi * t / G);
    }
    std::vector<int> idx(n);
    for (const auto& [nu, cs] : p.terms()) {
        std::vector<std::vector<int>> axis(n, std::vector<int>(G));
        for (int d = 0; d < n; ++d) {
            const int step = ((nu[d] % G) + G) % G;
            for (int i = 0; i < G; ++i) axis[d][i] = static_cast<int>((static_cast<long>(step) * i) % G);
        }
        for (long node = 0; node < grid.nodes; ++node) {
            grid.decode(node, idx);
            int phase = 0;
            for (int d = 0; d < n; ++d) phase += axis[d][idx[d]];
            phase %= G;
            out[node] += cs[0] * cos_t[phase] + cs[1] * sin_t[phase];
        }
    }
    return out;
}

// Forward/backward DFTs along each axis plus frequency-space scaling. Used for
// coordinate partials of smooth grid functions; exact whenever the sampled
// function is band-limited below Nyquist.
class SpectralCalc {
public:
    explicit SpectralCalc(const Grid& grid) : grid_(grid) {
        const int G = grid.G;
        fwd_.resize(G);
        inv_.resize(G);
        for (int t = 0; t < G; ++t) {
            fwd_[t] = std::polar(1.0, -kTwoPi * t / G);
            inv_[t] = std::polar(1.0, kTwoPi * t / G);
        }
    }

    // complex spectrum of a real grid function
    std::vector<std::complex<double>> forward(const Vector& f) const {
        std::vector<std::complex<double>> data(grid_.nodes);
        for (long i = 0; i < grid_.nodes; ++i) data[i] = f[i];
        for (int a = 0; a < grid_.n(); ++a) axis_dft(data, a, fwd_, false);
        return data;
    }

    Vector inverse(std::vector<std::complex<double>> data) const {
        for (int a = 0; a < grid_.n(); ++a) axis_dft(data, a, inv_, true);
        Vector out(grid_.nodes);
        for (long i = 0; i < grid_.nodes; ++i) out[i] = data[i].real();
        return out;
    }

    // d/dx_j via multiplication by 2 pi i kappa_j(nu) in frequency space
    Vector partial(const Vector& f, int j) const {
        auto spec = forward(f);
        scale_by_ikappa(spec, j);
        return inverse(std::move(spec));
    }

    // sum_j d/dx_j W_j with one inverse transform
    Vector divergence(const std::vector<Vector>& w) const {
        std::vector<std::complex<double>> acc(grid_.nodes, 0.0);
        for (int j = 0; j < grid_.n(); ++j) {
            auto spec = forward(w[j]);
            scale_by_ikappa(spec, j);
            for (long i = 0; i < grid_.nodes; ++i) acc[i] += spec[i];
        }
        return inverse(std::move(acc));
    }

private:
    void scale_by_ikappa(std::vector<std::complex<double>>& spec, int j) const {
        const int n = grid_.n(), G = grid_.G;
        std::vector<int> idx(n);
        for (long node = 0; node < grid_.nodes; ++node) {
            grid_.decode(node, idx);
            double kj = 0.0;
            for (int d = 0; d < n; ++d) {
                int nu = idx[d];
                if (nu > G / 2) nu -= G;
                if (2 * nu == G) nu = 0;  // drop the ambiguous Nyquist line
                kj += grid_.dual(j, d) * nu;
            }
            spec[node] *= std::complex<double>(0.0, kTwoPi * kj);
        }
    }

    void axis_dft(std::vector<std::complex<double>>& data, int axis, const std::vector<std::complex<double>>& w,
                  bool normalize) const {
        const int n = grid_.n(), G = grid_.G;
        long stride = 1;
        for (int d = axis + 1; d < n; ++d) stride *= G;
        const long outer = grid_.nodes / (static_cast<long>(G) * stride);
        std::vector<std::complex<double>> line(G);
        for (long o = 0; o < outer; ++o)
            for (long s = 0; s < stride; ++s) {
                const long base = o * G * stride + s;
                for (int k = 0; k < G; ++k) {
                    std::complex<double> acc = 0.0;
                    for (int t = 0; t < G; ++t) acc += data[base + t * stride] * w[static_cast<long>(k) * t % G];
                    line[k] = acc;
                }
                const double norm = normalize ? 1.0 / G : 1.0;
                for (int k = 0; k < G; ++k) data[base + k * stride] = line[k] * norm;
            }
    }

    Grid grid_;
    std::vector<std::complex<double>> fwd_, inv_;
};

// Pointwise metric data on a grid: component values, inverse components,
// sqrt(det). Fails loudly on a non-SPD node.
struct MetricOnGrid {
    int n = 0;
    long nodes = 0;
    std::vector<Vector> comp;      // packed j <= k, g_jk per node
    std::vector<Vector> inv_comp;  // packed j <= k, g^jk per node
    Vector sqrt_det;

    const Vector& g(int j, int k) const { return comp[detail::pair_index(j, k, n)]; }
    const Vector& ginv(int j, int k) const { return inv_comp[detail::pair_index(j, k, n)]; }
};

inline MetricOnGrid sample_metric(const MetricField& metric, const Grid& grid, double spd_floor = 1e-10) {
    MetricOnGrid m;
    m.n = metric.lattice.dim;
    m.nodes = grid.nodes;
    for (const auto& c : metric.comp) m.comp.push_back(sample(c, grid));
    m.inv_comp.assign(m.comp.size(), Vector::Zero(grid.nodes));
    m.sqrt_det = Vector::Zero(grid.nodes);

    Matrix gx(m.n, m.n);
    for (long node = 0; node < grid.nodes; ++node) {
        for (int j = 0; j < m.n; ++j)
            for (int k = j; k < m.n; ++k) gx(j, k) = gx(k, j) = m.g(j, k)[node];
        Eigen::SelfAdjointEigenSolver<Matrix> es(gx);
        if (es.eigenvalues()[0] <= spd_floor) {
            std::vector<int> idx(m.n);
            grid.decode(node, idx);
            std::string where;
            for (int d = 0; d < m.n; ++d) where += (d ? "," : "(") + std::to_string(idx[d]);
            throw ComputeError("metric not positive definite at grid node " + where + ")");
        }
        const Matrix inv = gx.inverse();
        for (int j = 0; j < m.n; ++j)
            for (int k = j; k < m.n; ++k) m.inv_comp[detail::pair_index(j, k, m.n)][node] = inv(j, k);
        m.sqrt_det[node] = std::sqrt(gx.determinant());
    }
    return m;
}

}  // namespace speclab
