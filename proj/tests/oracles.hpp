// Test-only oracles, independent of the library's solution paths:
//  - closed forms for constant and linear vorticity streams,
//  - the entire characteristic function of the constant-potential Robin
//    problem (roots = eigenvalues, found by scan + bisection),
//  - a second-order finite-difference discretization of the dispersion
//    problem, solved by Sturm-sequence bisection on the tridiagonal pencil.

#ifndef CRESTLINE_TEST_ORACLES_HPP
#define CRESTLINE_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// --- closed forms: constant vorticity b, slope s ---------------------------

// U(Y) = sY - bY^2/2
inline double parabola_u(double s, double b, double y) { return s * y - 0.5 * b * y * y; }

// principal depth for constant b: d = (s - sqrt(s^2 - 2b))/b
inline double constant_depth(double s, double b) {
    return (s - std::sqrt(s * s - 2.0 * b)) / b;
}

// tau+ = s^2/(2b), y+ = s/b for b > 0
inline double constant_tau_plus(double s, double b) { return s * s / (2.0 * b); }
inline double constant_y_plus(double s, double b) { return s / b; }

// linear vorticity gamma > 0: U(Y) = (s/sqrt(gamma)) sin(sqrt(gamma) Y)
inline double oscillator_u(double s, double gamma, double y) {
    const double w = std::sqrt(gamma);
    return s / w * std::sin(w * y);
}

// --- constant-potential Robin eigenvalues -----------------------------------

// Entire characteristic function G(nu) with roots at the eigenvalues of
//   -phi'' = nu phi, phi(0) = 0, phi'(d) = kappa phi(d):
// G(nu) = cos(t d) - kappa sin(t d)/t, continued through nu <= 0.
inline double robin_characteristic(double nu, double d, double kappa) {
    if (nu > 1e-8) {
        const double t = std::sqrt(nu);
        return std::cos(t * d) - kappa * std::sin(t * d) / t;
    }
    if (nu < -1e-8) {
        const double t = std::sqrt(-nu);
        return std::cosh(t * d) - kappa * std::sinh(t * d) / t;
    }
    // Taylor at nu = 0
    return (1.0 - nu * d * d / 2.0) - kappa * (d - nu * d * d * d / 6.0);
}

// First n roots of G, by dense scan + bisection.  `lo` should sit below the
// lowest eigenvalue (e.g. -(kappa^2 + 10) - margin).
inline std::vector<double> robin_eigenvalues(double d, double kappa, int n, double lo) {
    std::vector<double> roots;
    const double spacing = (M_PI / d) * (M_PI / d);
    const double step = spacing / 64.0;
    double nu = lo;
    double g = robin_characteristic(nu, d, kappa);
    while (static_cast<int>(roots.size()) < n) {
        const double nu2 = nu + step;
        const double g2 = robin_characteristic(nu2, d, kappa);
        if ((g < 0.0) != (g2 < 0.0)) {
            double a = nu, b = nu2;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if ((robin_characteristic(mid, d, kappa) < 0.0) ==
                    (robin_characteristic(a, d, kappa) < 0.0))
                    a = mid;
                else
                    b = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        nu = nu2;
        g = g2;
        if (nu > lo + 1e7) throw std::runtime_error("robin_eigenvalues: scan ran away");
    }
    return roots;
}

// --- finite-difference cross-check ------------------------------------------

// Eigenvalues of  -phi'' - q(z) phi = mu phi,  phi(0)=0, phi'(d)=kappa phi(d)
// on an M-point grid (z_i = i h, i = 1..M), as the generalized symmetric
// tridiagonal pencil A phi = mu B phi with the half-weighted boundary row.
// Sturm-sequence bisection via the LDL^T inertia of A - sigma B.
class FdDispersion {
  public:
    FdDispersion(std::function<double(double)> q, double d, double kappa, int M)
        : d_(d), M_(M), h_(d / M) {
        diagA_.resize(M);
        diagB_.assign(M, 1.0);
        off_ = -1.0 / (h_ * h_);
        for (int i = 1; i <= M; ++i) {
            const double z = h_ * i;
            if (i < M)
                diagA_[i - 1] = 2.0 / (h_ * h_) - q(z);
            else
                diagA_[i - 1] = 1.0 / (h_ * h_) - kappa / h_ - 0.5 * q(z);
        }
        diagB_[M - 1] = 0.5;
    }

    // number of eigenvalues strictly below sigma
    int count_below(double sigma) const {
        int count = 0;
        double prev = 0.0;
        for (int i = 0; i < M_; ++i) {
            const double a = diagA_[i] - sigma * diagB_[i];
            double dpiv = a;
            if (i > 0) dpiv -= off_ * off_ / prev;
            if (dpiv == 0.0) dpiv = -1e-300;
            if (dpiv < 0.0) ++count;
            prev = dpiv;
        }
        return count;
    }

    double eigenvalue(int j) const { // 1-based
        double lo = -1.0, hi = 1.0;
        while (count_below(lo) >= j) lo = 2.0 * lo - 1.0;
        while (count_below(hi) < j) hi = 2.0 * hi + 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(mid) >= j)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    double d_;
    int M_;
    double h_;
    double off_;
    std::vector<double> diagA_, diagB_;
};

} // namespace oracles

#endif
