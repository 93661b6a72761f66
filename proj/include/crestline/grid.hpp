#ifndef CRESTLINE_GRID_HPP
#define CRESTLINE_GRID_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace crestline {

/// A real function sampled on a uniform grid over [a, b], evaluated anywhere
/// in between by 4-point (cubic Lagrange) interpolation.  The stencil is
/// shifted at the ends so no ghost values are needed.
struct SampledFunction {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(double a_, double b_, std::vector<double> v)
        : a(a_), b(b_), values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double step() const { return (b - a) / static_cast<double>(values.size() - 1); }
    double node(std::size_t i) const { return a + step() * static_cast<double>(i); }

    double operator()(double x) const {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
        assert(n >= 4);
        const double h = step();
        double u = (x - a) / h;
        // base index of the second stencil node; stencil is {i-1, i, i+1, i+2}
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u));
        if (i < 1) i = 1;
        if (i > n - 3) i = n - 3;
        const double t = u - static_cast<double>(i);
        const double wl = -t * (t - 1.0) * (t - 2.0) / 6.0;
        const double w0 = (t * t - 1.0) * (t - 2.0) / 2.0;
        const double w1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
        const double w2 = t * (t * t - 1.0) / 6.0;
        return wl * values[i - 1] + w0 * values[i] + w1 * values[i + 1] + w2 * values[i + 2];
    }
};

/// Cubic interpolation of a value series sampled at x0 + i*h (same stencil
/// logic as SampledFunction, but without owning the data).
inline double interp_uniform(const std::vector<double>& v, double x0, double h, double x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    assert(n >= 4);
    double u = (x - x0) / h;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u));
    if (i < 1) i = 1;
    if (i > n - 3) i = n - 3;
    const double t = u - static_cast<double>(i);
    const double wl = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w0 = (t * t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
    const double w2 = t * (t * t - 1.0) / 6.0;
    return wl * v[i - 1] + w0 * v[i] + w1 * v[i + 1] + w2 * v[i + 2];
}

} // namespace crestline

#endif
