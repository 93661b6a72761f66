#ifndef CRESTLINE_QUADRATURE_HPP
#define CRESTLINE_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "crestline/errors.hpp"

namespace crestline {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial with the Chebyshev-like initial guess.
inline void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    if (order < 1) throw error("gauss_legendre: order must be >= 1");
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < order; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

/// A composite Gauss-Legendre rule: `panels` equal panels of the given order
/// over [a, b].  Nodes are strictly interior, which lets integrands with
/// integrable endpoint behavior be evaluated without special-casing.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    static Quadrature composite(double a, double b, int panels, int order) {
        std::vector<double> gx, gw;
        gauss_legendre(order, gx, gw);
        Quadrature q;
        q.nodes.reserve(static_cast<std::size_t>(panels) * order);
        q.weights.reserve(static_cast<std::size_t>(panels) * order);
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * h;
            const double mid = lo + 0.5 * h;
            for (int k = 0; k < order; ++k) {
                q.nodes.push_back(mid + 0.5 * h * gx[k]);
                q.weights.push_back(0.5 * h * gw[k]);
            }
        }
        return q;
    }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

/// One-shot composite integration helper.
template <class F>
double integrate_composite(F&& f, double a, double b, int panels = 64, int order = 8) {
    return Quadrature::composite(a, b, panels, order).integrate(f);
}

} // namespace crestline

#endif
