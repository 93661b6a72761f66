#ifndef CRESTLINE_VORTICITY_HPP
#define CRESTLINE_VORTICITY_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "crestline/errors.hpp"

namespace crestline {

enum class VorticityKind { zero, constant, linear, polynomial };

inline const char* to_string(VorticityKind k) {
    switch (k) {
        case VorticityKind::zero: return "zero";
        case VorticityKind::constant: return "constant";
        case VorticityKind::linear: return "linear";
        case VorticityKind::polynomial: return "polynomial";
    }
    return "?";
}

/// The prescribed vorticity family omega(p; lambda'): a polynomial in the
/// stream-function value p with coefficient vector lambda'.  The zero,
/// constant and linear kinds are the closed-form special cases used by the
/// test oracles.  omega, omega' and the primitive Omega are all analytic;
/// nothing here is differentiated numerically.
///
/// Immutable after construction; safe for concurrent reads.
class VorticityModel {
  public:
    VorticityModel() : kind_(VorticityKind::zero) {}

    static VorticityModel zero() { return VorticityModel(); }

    static VorticityModel constant(double b) {
        VorticityModel m;
        m.kind_ = VorticityKind::constant;
        m.coefficients_ = {b};
        m.powers_ = {b};
        return m;
    }

    /// omega(p) = gamma * p
    static VorticityModel linear(double gamma) {
        VorticityModel m;
        m.kind_ = VorticityKind::linear;
        m.coefficients_ = {gamma};
        m.powers_ = {0.0, gamma};
        return m;
    }

    /// omega(p) = sum_i c[i] p^i
    static VorticityModel polynomial(std::vector<double> c) {
        VorticityModel m;
        m.kind_ = VorticityKind::polynomial;
        m.coefficients_ = c;
        m.powers_ = std::move(c);
        if (m.powers_.empty()) m.powers_ = {0.0};
        return m;
    }

    static VorticityModel make(VorticityKind kind, const std::vector<double>& c) {
        switch (kind) {
            case VorticityKind::zero: return zero();
            case VorticityKind::constant:
                if (c.size() != 1) throw config_error("vorticity.coefficients: constant kind takes exactly one coefficient");
                return constant(c[0]);
            case VorticityKind::linear:
                if (c.size() != 1) throw config_error("vorticity.coefficients: linear kind takes exactly one coefficient");
                return linear(c[0]);
            case VorticityKind::polynomial: return polynomial(c);
        }
        throw config_error("vorticity.kind: unknown kind");
    }

    VorticityKind kind() const { return kind_; }
    const std::vector<double>& coefficients() const { return coefficients_; }

    double omega(double p) const {
        double acc = 0.0;
        for (std::size_t i = powers_.size(); i-- > 0;) acc = acc * p + powers_[i];
        return acc;
    }

    double omega_prime(double p) const {
        if (powers_.size() < 2) return 0.0;
        double acc = 0.0;
        for (std::size_t i = powers_.size(); i-- > 1;) acc = acc * p + static_cast<double>(i) * powers_[i];
        return acc;
    }

    /// Omega(tau) = integral of omega from 0 to tau; Omega(0) = 0 exactly.
    double primitive(double tau) const {
        double acc = 0.0;
        for (std::size_t i = powers_.size(); i-- > 0;) acc = acc * tau + powers_[i] / static_cast<double>(i + 1);
        return acc * tau;
    }

    /// Stable divided difference (Omega(a) - Omega(a - x)) / x.  Uses the
    /// identity (a^m - (a-x)^m)/x = sum_{i<m} a^i (a-x)^{m-1-i}, so there is
    /// no cancellation when x is small; the turning-point quadrature relies
    /// on this near the endpoint.
    double primitive_diff(double a, double x) const {
        const double b = a - x;
        const std::size_t deg = powers_.size();
        std::vector<double> pa(deg, 1.0), pb(deg, 1.0);
        for (std::size_t j = 1; j < deg; ++j) {
            pa[j] = pa[j - 1] * a;
            pb[j] = pb[j - 1] * b;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            double inner = 0.0;
            for (std::size_t m = 0; m <= i; ++m) inner += pa[m] * pb[i - m];
            acc += powers_[i] / static_cast<double>(i + 1) * inner;
        }
        return acc;
    }

  private:
    VorticityKind kind_;
    std::vector<double> coefficients_; // the parameter vector lambda'
    std::vector<double> powers_;       // canonical power-series coefficients
};

/// Evaluate omega and omega' at p.
inline std::pair<double, double> eval(const VorticityModel& m, double p) {
    return {m.omega(p), m.omega_prime(p)};
}

inline double primitive(const VorticityModel& m, double tau) { return m.primitive(tau); }

} // namespace crestline

#endif
