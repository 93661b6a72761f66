#ifndef CRESTLINE_STREAM_HPP
#define CRESTLINE_STREAM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "crestline/errors.hpp"
#include "crestline/grid.hpp"
#include "crestline/quadrature.hpp"
#include "crestline/vorticity.hpp"

namespace crestline {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Branch label (sign, j) of the depth families d_j^+ / d_j^-.
struct Branch {
    int sign = +1; // +1 or -1
    int j = 0;

    std::string label() const {
        return std::string(sign > 0 ? "(+," : "(-,") + std::to_string(j) + ")";
    }
};

/// Turning points tau+/- of 2*Omega(tau) = s^2 and the monotonicity bounds
/// y+/- of the Cauchy solution.  Infinite entries mean "no finite member":
/// either the equation has no root on that side or omega vanishes at the
/// root (the singular-family condition, flagged separately).
struct TurningData {
    double tau_plus = infinity;
    double tau_minus = -infinity;
    double y_plus = infinity;
    double y_minus = -infinity;
    double s0 = 0.0;
    bool singular_plus = false;  // omega(tau+) = 0 with tau+ finite
    bool singular_minus = false; // omega(tau-) = 0 with tau- finite
};

/// One member of the depth families, with its Bernoulli constant.
struct DepthFamilyEntry {
    int sign = +1;
    int j = 0;
    double depth = infinity;
    double bernoulli = infinity;
    bool finite = false;
};

/// A shear-flow (stream) solution u(Y) on [0, d]: u(0) = 0, u(d) = 1,
/// u'' + omega(u) = 0, with the induced surface data k = u'(d),
/// kappa = 1/k^2 - omega(1)/k and Bernoulli constant r.
///
/// The grid carries u, u' and u''; u'' is filled from the equation itself,
/// so it is exact wherever u is.
struct StreamSolution {
    double s = 0.0;
    Branch branch;
    double d = 0.0;
    double k = 0.0;
    double kappa = 0.0;
    double r = 0.0;
    SampledFunction u;
    SampledFunction u_z;
    SampledFunction u_zz;
};

/// s0 = sqrt(2 max_{0<=tau<=1} Omega(tau)).  The maximum is taken over a
/// dense grid plus the zeros of omega (the critical points of Omega),
/// refined by bisection inside any grid cell where omega changes sign.
inline double min_slope(const VorticityModel& model) {
    const int n = 4096;
    double best = 0.0; // Omega(0) = 0 is always a candidate
    double prev_tau = 0.0;
    double prev_w = model.omega(0.0);
    for (int i = 1; i <= n; ++i) {
        const double tau = static_cast<double>(i) / n;
        best = std::max(best, model.primitive(tau));
        const double w = model.omega(tau);
        if (prev_w == 0.0 || (prev_w < 0.0) != (w < 0.0)) {
            double lo = prev_tau, hi = tau;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((model.omega(mid) < 0.0) == (prev_w < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            best = std::max(best, model.primitive(0.5 * (lo + hi)));
        }
        prev_tau = tau;
        prev_w = w;
    }
    return best > 0.0 ? std::sqrt(2.0 * best) : 0.0;
}

/// The Cauchy solution U(Y; slope) of U'' + omega(U) = 0, U(0) = 0,
/// U'(0) = slope, advanced by fixed-step classical RK4 and checked against
/// the energy first integral U'^2 + 2 Omega(U) = slope^2.
struct CauchySolution {
    double y0 = 0.0, y1 = 0.0;
    std::vector<double> u;       // n nodes, uniform over [y0, y1]
    std::vector<double> u_prime; // same grid
    double step() const { return (y1 - y0) / static_cast<double>(u.size() - 1); }
};

namespace detail {

inline CauchySolution integrate_shear(const VorticityModel& model, double slope, double length,
                                      int n_nodes) {
    if (n_nodes < 8) throw error("integrate_shear: too few grid nodes");
    CauchySolution sol;
    sol.y0 = 0.0;
    sol.y1 = length;
    sol.u.resize(static_cast<std::size_t>(n_nodes));
    sol.u_prime.resize(static_cast<std::size_t>(n_nodes));
    const double h = length / (n_nodes - 1);
    double u = 0.0, v = slope;
    sol.u[0] = u;
    sol.u_prime[0] = v;
    for (int i = 1; i < n_nodes; ++i) {
        const double k1u = v, k1v = -model.omega(u);
        const double k2u = v + 0.5 * h * k1v, k2v = -model.omega(u + 0.5 * h * k1u);
        const double k3u = v + 0.5 * h * k2v, k3v = -model.omega(u + 0.5 * h * k2u);
        const double k4u = v + h * k3v, k4v = -model.omega(u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        sol.u[i] = u;
        sol.u_prime[i] = v;
    }
    // energy drift guard: |U'^2 + 2 Omega(U) - slope^2| per unit length
    const double energy0 = slope * slope;
    double worst = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double e = sol.u_prime[i] * sol.u_prime[i] + 2.0 * model.primitive(sol.u[i]);
        worst = std::max(worst, std::abs(e - energy0));
    }
    const double tol = 1e-10 * std::max(1.0, std::abs(length));
    if (worst > tol)
        throw convergence_error("cauchy_solve: energy drift " + std::to_string(worst) +
                                " exceeds tolerance; refine the grid");
    return sol;
}

} // namespace detail

/// The Cauchy problem with positive initial slope s on [0, y_hi].
inline CauchySolution cauchy_solve(const VorticityModel& model, double s, double y_hi,
                                   int n_nodes = 2048) {
    if (!(s > 0.0)) throw error("cauchy_solve: requires s > 0");
    return detail::integrate_shear(model, s, y_hi, n_nodes);
}

namespace detail {

/// Smallest positive root of 2 Omega(tau) = s^2 (dir = +1) or largest
/// negative root (dir = -1); +/-infinity when none exists below huge bounds.
inline double turning_root(const VorticityModel& model, double s, int dir) {
    const double target = s * s;
    auto f = [&](double tau) { return 2.0 * model.primitive(tau) - target; };
    // dense sweep near the origin, then geometric extension
    const double sign = (dir > 0) ? 1.0 : -1.0;
    double prev = 0.0;
    const int n_dense = 8192;
    const double dense_end = 4.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    for (int i = 1; i <= n_dense && !found; ++i) {
        const double tau = sign * dense_end * static_cast<double>(i) / n_dense;
        if (f(tau) >= 0.0) {
            bracket_lo = prev;
            bracket_hi = tau;
            found = true;
        } else {
            prev = tau;
        }
    }
    if (!found) {
        double tau = sign * dense_end;
        while (std::abs(tau) < 1e9) {
            const double next = tau * 1.05;
            if (f(next) >= 0.0) {
                bracket_lo = tau;
                bracket_hi = next;
                found = true;
                break;
            }
            tau = next;
        }
    }
    if (!found) return sign * infinity;
    // 80 bisection steps; Omega' = omega may vanish, so no Newton here
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if (f(mid) >= 0.0)
            bracket_hi = mid;
        else
            bracket_lo = mid;
    }
    return 0.5 * (bracket_lo + bracket_hi);
}

} // namespace detail

/// Turning points and monotonicity bounds.  The y+/- integrals resolve the
/// inverse-square-root endpoint singularity with the substitution
/// tau = tau+/- -/+ sigma^2, under which the integrand becomes
/// sqrt(2 / H(sigma^2)) with H a stable divided difference of Omega.
inline TurningData turning_points(const VorticityModel& model, double s) {
    if (!(s > 0.0)) throw error("turning_points: requires s > 0");
    TurningData t;
    t.s0 = min_slope(model);
    t.tau_plus = detail::turning_root(model, s, +1);
    t.tau_minus = detail::turning_root(model, s, -1);

    const int panels = 96, order = 10;
    if (std::isfinite(t.tau_plus)) {
        if (std::abs(model.omega(t.tau_plus)) < 1e-12) {
            t.singular_plus = true;
            t.y_plus = infinity;
        } else {
            const double smax = std::sqrt(t.tau_plus);
            t.y_plus = integrate_composite(
                [&](double sigma) {
                    const double H = model.primitive_diff(t.tau_plus, sigma * sigma);
                    return std::sqrt(2.0 / H);
                },
                0.0, smax, panels, order);
        }
    }
    if (std::isfinite(t.tau_minus)) {
        if (std::abs(model.omega(t.tau_minus)) < 1e-12) {
            t.singular_minus = true;
            t.y_minus = -infinity;
        } else {
            const double smax = std::sqrt(-t.tau_minus);
            t.y_minus = -integrate_composite(
                [&](double sigma) {
                    const double H = -model.primitive_diff(t.tau_minus, -sigma * sigma);
                    return std::sqrt(2.0 / H);
                },
                0.0, smax, panels, order);
        }
    }
    return t;
}

/// d(s) = int_0^1 dtau / sqrt(s^2 - 2 Omega(tau)), the principal depth.
inline double principal_depth(const VorticityModel& model, double s) {
    const double s0 = min_slope(model);
    if (!(s > s0))
        throw error("principal_depth: requires s > s0 = " + std::to_string(s0) +
                    " (integrand not real on [0,1])");
    return integrate_composite(
        [&](double tau) { return 1.0 / std::sqrt(s * s - 2.0 * model.primitive(tau)); }, 0.0, 1.0,
        128, 10);
}

/// All members of both depth families with index <= j_max.  Entries whose
/// formula involves an infinite y+/- are flagged non-finite rather than
/// dropped.  The minus family starts at j = 1.
inline std::vector<DepthFamilyEntry> depth_family(const VorticityModel& model, double s,
                                                  int j_max) {
    const double d = principal_depth(model, s);
    const TurningData t = turning_points(model, s);
    const double Omega1 = model.primitive(1.0);
    auto bernoulli = [&](double depth) { return (s * s - 2.0 * Omega1 + 2.0 * depth) / 3.0; };
    std::vector<DepthFamilyEntry> out;
    for (int j = 0; j <= j_max; ++j) {
        double depth;
        if (j == 0) {
            depth = d;
        } else if (j % 2 == 0) {
            const int k = j / 2; // >= 1 here
            depth = d + 2.0 * k * (t.y_plus - t.y_minus);
        } else {
            const int k = (j - 1) / 2;
            depth = d + 2.0 * (t.y_plus - d);
            if (k > 0) depth += 2.0 * k * (t.y_plus - t.y_minus);
        }
        DepthFamilyEntry e;
        e.sign = +1;
        e.j = j;
        e.depth = depth;
        e.bernoulli = bernoulli(depth);
        e.finite = std::isfinite(depth);
        out.push_back(e);
    }
    for (int j = 1; j <= j_max; ++j) {
        const DepthFamilyEntry& plus = out[static_cast<std::size_t>(j)];
        DepthFamilyEntry e;
        e.sign = -1;
        e.j = j;
        e.depth = plus.depth - 2.0 * t.y_minus;
        e.bernoulli = bernoulli(e.depth);
        e.finite = std::isfinite(e.depth);
        out.push_back(e);
    }
    return out;
}

/// Build the stream solution on the requested branch.  The minus family is
/// the Cauchy solution restarted at its descending zero, which is the same
/// trajectory with initial slope -s; the plus family starts with slope +s.
inline StreamSolution build_stream(const VorticityModel& model, double s, Branch branch,
                                   int grid_points = 2048) {
    const double s0 = min_slope(model);
    if (!(s > s0))
        throw error("build_stream: requires s > s0 = " + std::to_string(s0));
    if (branch.j < 0 || (branch.sign < 0 && branch.j < 1))
        throw error("build_stream: invalid branch " + branch.label());

    const auto family = depth_family(model, s, std::max(branch.j, 1));
    const DepthFamilyEntry* entry = nullptr;
    for (const auto& e : family)
        if (e.sign == branch.sign && e.j == branch.j) entry = &e;
    if (entry == nullptr || !entry->finite)
        throw assumption_error("build_stream: branch " + branch.label() +
                               " has no finite member for this vorticity and s");

    const double depth = entry->depth;
    const double slope0 = branch.sign > 0 ? s : -s;
    CauchySolution c = detail::integrate_shear(model, slope0, depth, grid_points);

    const double surface_gap = std::abs(c.u.back() - 1.0);
    if (surface_gap > 1e-7)
        throw convergence_error("build_stream: u(d) misses 1 by " + std::to_string(surface_gap) +
                                "; depth quadrature and ODE solution disagree");
    // pin the surface node so downstream boundary algebra cancels exactly
    c.u.back() = 1.0;

    StreamSolution sol;
    sol.s = s;
    sol.branch = branch;
    sol.d = depth;
    sol.k = c.u_prime.back();
    if (std::abs(sol.k) < 1e-8)
        throw assumption_error("build_stream: assumption u'(d) != 0 violated (k = " +
                               std::to_string(sol.k) + ")");
    sol.r = entry->bernoulli;
    if (std::abs(depth - sol.r) < 1e-8)
        throw assumption_error("build_stream: assumption d != r violated (d = r = " +
                               std::to_string(depth) + ")");
    sol.kappa = 1.0 / (sol.k * sol.k) - model.omega(1.0) / sol.k;

    sol.u = SampledFunction(0.0, depth, c.u);
    sol.u_z = SampledFunction(0.0, depth, c.u_prime);
    std::vector<double> uzz(c.u.size());
    for (std::size_t i = 0; i < c.u.size(); ++i) uzz[i] = -model.omega(c.u[i]);
    sol.u_zz = SampledFunction(0.0, depth, std::move(uzz));
    return sol;
}

} // namespace crestline

#endif
