#pragma once

// Symmetric (0,2)-tensor fields on a torus, stored as truncated Fourier data
// per component pair j <= k. The metric g and the perturbation direction h
// share the representation; a conformal perturbation h = f*g keeps its scalar
// factor alongside the expanded components.

#include <utility>
#include <vector>

#include "speclab/common.hpp"
#include "speclab/lattice.hpp"
#include "speclab/trig.hpp"

namespace speclab {

namespace detail {
inline size_t pair_index(int j, int k, int n) {
    if (j > k) std::swap(j, k);
    return static_cast<size_t>(j) * n - static_cast<size_t>(j) * (j + 1) / 2 + k;
}
}  // namespace detail

struct PerturbationTensor;

struct MetricField {
    Lattice lattice;
    std::vector<TrigPoly> comp;  // packed j <= k

    MetricField() = default;
    explicit MetricField(const Lattice& lat)
        : lattice(lat), comp(static_cast<size_t>(lat.dim) * (lat.dim + 1) / 2, TrigPoly(lat.dim)) {}

    static MetricField flat(const Lattice& lat) {
        MetricField g(lat);
        for (int j = 0; j < lat.dim; ++j) g.at(j, j) = TrigPoly::constant(lat.dim, 1.0);
        return g;
    }

    static MetricField constant(const Lattice& lat, const Matrix& g0) {
        MetricField g(lat);
        for (int j = 0; j < lat.dim; ++j)
            for (int k = j; k < lat.dim; ++k)
                if (g0(j, k) != 0.0) g.at(j, k) = TrigPoly::constant(lat.dim, g0(j, k));
        return g;
    }

    TrigPoly& at(int j, int k) { return comp[detail::pair_index(j, k, lattice.dim)]; }
    const TrigPoly& at(int j, int k) const { return comp[detail::pair_index(j, k, lattice.dim)]; }

    bool is_constant() const {
        for (const auto& c : comp)
            if (c.bandwidth_inf() > 0) return false;
        return true;
    }

    Matrix constant_matrix() const {
        Matrix g0 = Matrix::Zero(lattice.dim, lattice.dim);
        const Vector origin = Vector::Zero(lattice.dim);
        for (int j = 0; j < lattice.dim; ++j)
            for (int k = j; k < lattice.dim; ++k) g0(j, k) = g0(k, j) = at(j, k).value(origin);
        return g0;
    }

    int bandwidth() const {
        int b = 0;
        for (const auto& c : comp) b = std::max(b, c.bandwidth_inf());
        return b;
    }

    MetricField plus_scaled(const PerturbationTensor& h, double t) const;
};

struct PerturbationTensor {
    Lattice lattice;
    std::vector<TrigPoly> comp;  // packed j <= k
    bool conformal = false;
    TrigPoly factor;  // the scalar f when conformal (h = f*g)

    PerturbationTensor() = default;
    explicit PerturbationTensor(const Lattice& lat)
        : lattice(lat), comp(static_cast<size_t>(lat.dim) * (lat.dim + 1) / 2, TrigPoly(lat.dim)), factor(lat.dim) {}

    TrigPoly& at(int j, int k) { return comp[detail::pair_index(j, k, lattice.dim)]; }
    const TrigPoly& at(int j, int k) const { return comp[detail::pair_index(j, k, lattice.dim)]; }

    int bandwidth() const {
        int b = 0;
        for (const auto& c : comp) b = std::max(b, c.bandwidth_inf());
        return b;
    }

    // h = f * g, expanded exactly through the trig product
    static PerturbationTensor conformal_from(const TrigPoly& f, const MetricField& g) {
        PerturbationTensor h(g.lattice);
        h.conformal = true;
        h.factor = f;
        for (size_t i = 0; i < g.comp.size(); ++i) h.comp[i] = f * g.comp[i];
        return h;
    }

    static PerturbationTensor from_metric(const MetricField& g) {
        return conformal_from(TrigPoly::constant(g.lattice.dim, 1.0), g);
    }

    PerturbationTensor scaled(double t) const {
        PerturbationTensor h(lattice);
        h.conformal = conformal;
        h.factor = factor.scaled(t);
        for (size_t i = 0; i < comp.size(); ++i) h.comp[i] = comp[i].scaled(t);
        return h;
    }
};

inline MetricField MetricField::plus_scaled(const PerturbationTensor& h, double t) const {
    MetricField out = *this;
    for (size_t i = 0; i < comp.size(); ++i) out.comp[i].add_scaled(h.comp[i], t);
    return out;
}

}  // namespace speclab
