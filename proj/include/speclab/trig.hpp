#pragma once

// Sparse trigonometric polynomials on a torus R^n / Lambda, indexed by integer
// frequency vectors nu in the dual basis (the physical frequency is
// kappa = D nu). Terms are kept canonical: one entry per antipodal pair with
// the first nonzero component of nu positive, cos/sin coefficient pairs.
// Products, coordinate partials and L^2 pairings are exact, which is what
// makes the dual-path splitting checks meaningful.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "speclab/common.hpp"

namespace speclab {

using FreqKey = std::vector<int>;

class TrigPoly {
public:
    TrigPoly() = default;
    explicit TrigPoly(int dim) : dim_(dim) {}

    static TrigPoly constant(int dim, double c) {
        TrigPoly p(dim);
        p.add(FreqKey(dim, 0), c, 0.0);
        return p;
    }

    static TrigPoly mode(const FreqKey& freq, double cos_c, double sin_c) {
        TrigPoly p(static_cast<int>(freq.size()));
        p.add(freq, cos_c, sin_c);
        return p;
    }

    int dim() const { return dim_; }
    bool empty() const { return terms_.empty(); }
    const std::map<FreqKey, std::array<double, 2>>& terms() const { return terms_; }

    // accumulate c*cos(2 pi nu.y) + s*sin(2 pi nu.y); canonicalizes nu
    void add(FreqKey nu, double c, double s) {
        if (c == 0.0 && s == 0.0) return;
        bool all_zero = true;
        for (size_t i = 0; i < nu.size(); ++i) {
            if (nu[i] > 0) { all_zero = false; break; }
            if (nu[i] < 0) {
                for (auto& x : nu) x = -x;
                s = -s;
                all_zero = false;
                break;
            }
        }
        if (all_zero) s = 0.0;  // sin(0) term vanishes
        auto& t = terms_[nu];
        t[0] += c;
        t[1] += s;
        if (t[0] == 0.0 && t[1] == 0.0) terms_.erase(nu);
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        for (const auto& [nu, cs] : o.terms_) add(nu, cs[0], cs[1]);
        return *this;
    }

    TrigPoly operator+(const TrigPoly& o) const {
        TrigPoly r = *this;
        r += o;
        return r;
    }

    TrigPoly scaled(double f) const {
        TrigPoly r(dim_);
        if (f == 0.0) return r;
        for (const auto& [nu, cs] : terms_) r.terms_[nu] = {f * cs[0], f * cs[1]};
        return r;
    }

    TrigPoly& add_scaled(const TrigPoly& o, double f) {
        for (const auto& [nu, cs] : o.terms_) add(nu, f * cs[0], f * cs[1]);
        return *this;
    }

    // product via the prosthaphaeresis identities
    TrigPoly operator*(const TrigPoly& o) const {
        TrigPoly r(dim_);
        FreqKey sum(dim_), dif(dim_);
        for (const auto& [a, p] : terms_)
            for (const auto& [b, q] : o.terms_) {
                for (int i = 0; i < dim_; ++i) {
                    sum[i] = a[i] + b[i];
                    dif[i] = a[i] - b[i];
                }
                const double c1 = p[0], s1 = p[1], c2 = q[0], s2 = q[1];
                r.add(sum, 0.5 * (c1 * c2 - s1 * s2), 0.5 * (c1 * s2 + s1 * c2));
                r.add(dif, 0.5 * (c1 * c2 + s1 * s2), 0.5 * (s1 * c2 - c1 * s2));
            }
        return r;
    }

    // d/dx_j; dual_basis columns are the dual generators (kappa = D nu)
    TrigPoly partial_x(int j, const Matrix& dual_basis) const {
        TrigPoly r(dim_);
        for (const auto& [nu, cs] : terms_) {
            double kj = 0.0;
            for (int i = 0; i < dim_; ++i) kj += dual_basis(j, i) * nu[i];
            const double f = kTwoPi * kj;
            if (f == 0.0) continue;
            r.add(nu, f * cs[1], -f * cs[0]);
        }
        return r;
    }

    // integral over one fundamental domain of covolume V
    double integral(double volume) const {
        auto it = terms_.find(FreqKey(dim_, 0));
        return it == terms_.end() ? 0.0 : volume * it->second[0];
    }

    // L^2(dx) pairing over one fundamental domain
    double inner(const TrigPoly& o, double volume) const {
        const TrigPoly *small = this, *big = &o;
        if (small->terms_.size() > big->terms_.size()) std::swap(small, big);
        double acc = 0.0;
        for (const auto& [nu, cs] : small->terms_) {
            auto it = big->terms_.find(nu);
            if (it == big->terms_.end()) continue;
            bool zero = true;
            for (int x : nu)
                if (x != 0) { zero = false; break; }
            acc += zero ? cs[0] * it->second[0] : 0.5 * (cs[0] * it->second[0] + cs[1] * it->second[1]);
        }
        return volume * acc;
    }

    double value(const Vector& y) const {
        double acc = 0.0;
        for (const auto& [nu, cs] : terms_) {
            double phase = 0.0;
            for (int i = 0; i < dim_; ++i) phase += nu[i] * y[i];
            phase *= kTwoPi;
            acc += cs[0] * std::cos(phase) + cs[1] * std::sin(phase);
        }
        return acc;
    }

    int bandwidth_inf() const {
        int b = 0;
        for (const auto& [nu, cs] : terms_)
            for (int x : nu) b = std::max(b, std::abs(x));
        return b;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [nu, cs] : terms_) m = std::max({m, std::abs(cs[0]), std::abs(cs[1])});
        return m;
    }

private:
    int dim_ = 0;
    std::map<FreqKey, std::array<double, 2>> terms_;
};

}  // namespace speclab
