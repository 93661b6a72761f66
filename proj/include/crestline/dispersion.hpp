#ifndef CRESTLINE_DISPERSION_HPP
#define CRESTLINE_DISPERSION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "crestline/errors.hpp"
#include "crestline/grid.hpp"
#include "crestline/quadrature.hpp"
#include "crestline/stream.hpp"
#include "crestline/vorticity.hpp"

namespace crestline {

/// Eigenpairs of the dispersion problem
///   -phi'' - omega'(u(z)) phi = mu phi on (0, d),
///   phi(0) = 0,  phi'(d) = kappa phi(d).
/// Eigenvalues are simple and stored ascending; eigenfunctions are
/// L2(0, d)-normalized with the sign fixed by phi'(0) > 0 and sampled on the
/// stream grid together with their first derivative.  Endpoint values are
/// kept separately so surface formulas never interpolate.
struct DispersionSpectrum {
    std::vector<double> mu;
    std::vector<SampledFunction> phi;
    std::vector<SampledFunction> phi_z;
    std::vector<double> phi_d;   // phi_j(d)
    std::vector<double> phi_z_d; // phi_j'(d)
    int n_negative = 0;          // count of mu_j <= 0
    bool strict = true;          // all counted eigenvalues strictly negative
    double robin = 0.0;          // kappa
    double depth = 0.0;          // d
};

struct NonpositiveCount {
    int n = 0;
    bool strict = true;
};

struct DispersionOptions {
    /// Added to the potential omega'(u(z)); the shift-identity tests use it.
    double potential_shift = 0.0;
    int max_secant_iters = 12;
    int substeps = 2; // RK4 substeps per stream-grid cell
};

namespace detail {

/// Potential q(z) = omega'(u(z)) + shift prepared at the cell endpoints and
/// midpoints of a uniform grid, so the phase and shooting integrators never
/// interpolate inside their stages.
struct PreparedPotential {
    double depth = 0.0;
    double h = 0.0;            // cell width
    std::vector<double> q0;    // q at cell left ends (and final right end)
    std::vector<double> qh;    // q at cell midpoints
    std::size_t cells() const { return qh.size(); }
};

inline PreparedPotential prepare_potential(const StreamSolution& stream,
                                           const VorticityModel& model, double shift,
                                           int substeps) {
    PreparedPotential p;
    const std::size_t cells = (stream.u.size() - 1) * static_cast<std::size_t>(substeps);
    p.depth = stream.d;
    p.h = stream.d / static_cast<double>(cells);
    p.q0.resize(cells + 1);
    p.qh.resize(cells);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double z = p.h * static_cast<double>(i);
        p.q0[i] = model.omega_prime(stream.u(z)) + shift;
    }
    for (std::size_t i = 0; i < cells; ++i) {
        const double z = p.h * (static_cast<double>(i) + 0.5);
        p.qh[i] = model.omega_prime(stream.u(z)) + shift;
    }
    return p;
}

/// Pruefer phase theta(d; mu) for phi = rho sin(theta), phi' = rho cos(theta):
/// theta' = cos^2(theta) + (mu + q(z)) sin^2(theta), theta(0) = 0.
/// Strictly increasing in mu, and theta crosses a multiple of pi exactly at
/// each interior zero of phi, which is what makes bracketing by phase safe.
inline double pruefer_phase(const PreparedPotential& p, double mu) {
    double theta = 0.0;
    const double h = p.h;
    auto rhs = [&](double q, double th) {
        const double st = std::sin(th), ct = std::cos(th);
        return ct * ct + (mu + q) * st * st;
    };
    for (std::size_t i = 0; i < p.cells(); ++i) {
        const double k1 = rhs(p.q0[i], theta);
        const double k2 = rhs(p.qh[i], theta + 0.5 * h * k1);
        const double k3 = rhs(p.qh[i], theta + 0.5 * h * k2);
        const double k4 = rhs(p.q0[i + 1], theta + h * k3);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return theta;
}

/// Direct shooting of (phi, phi') with phi(0) = 0, phi'(0) = 1, rescaled
/// when the amplitude grows too large (the ODE is linear, so any common
/// scale is irrelevant to the boundary residual).  When `store` is given it
/// receives (phi, phi') at every cell endpoint, without rescaling guards --
/// the caller only stores once the eigenvalue has converged, where growth is
/// moderate.
inline void shoot(const PreparedPotential& p, double mu, double& phi_end, double& dphi_end,
                  std::vector<double>* phi_store = nullptr,
                  std::vector<double>* dphi_store = nullptr) {
    double phi = 0.0, dphi = 1.0;
    const double h = p.h;
    const bool guard = (phi_store == nullptr);
    if (phi_store) {
        (*phi_store)[0] = phi;
        (*dphi_store)[0] = dphi;
    }
    for (std::size_t i = 0; i < p.cells(); ++i) {
        auto f = [&](double q, double ph) { return -(mu + q) * ph; };
        const double k1p = dphi, k1d = f(p.q0[i], phi);
        const double k2p = dphi + 0.5 * h * k1d, k2d = f(p.qh[i], phi + 0.5 * h * k1p);
        const double k3p = dphi + 0.5 * h * k2d, k3d = f(p.qh[i], phi + 0.5 * h * k2p);
        const double k4p = dphi + h * k3d, k4d = f(p.q0[i + 1], phi + h * k3p);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if (guard && (std::abs(phi) > 1e130 || std::abs(dphi) > 1e130)) {
            phi *= 1e-130;
            dphi *= 1e-130;
        }
        if (phi_store) {
            (*phi_store)[i + 1] = phi;
            (*dphi_store)[i + 1] = dphi;
        }
    }
    phi_end = phi;
    dphi_end = dphi;
}

/// Robin boundary residual, normalized so it is scale-free in (phi, phi').
inline double robin_residual(const PreparedPotential& p, double kappa, double mu) {
    double phi, dphi;
    shoot(p, mu, phi, dphi);
    const double scale = std::hypot(phi, dphi);
    return (dphi - kappa * phi) / (scale > 0.0 ? scale : 1.0);
}

} // namespace detail

/// Lowest n_eigen eigenpairs by Pruefer-phase bracketing (bisection on the
/// phase, which pins the oscillation count) followed by a secant polish on
/// the Robin residual of the directly shot solution.
inline DispersionSpectrum solve_spectrum(const StreamSolution& stream,
                                         const VorticityModel& model, int n_eigen,
                                         const DispersionOptions& opts = {}) {
    if (n_eigen < 1) throw error("solve_spectrum: n_eigen must be >= 1");
    const auto pot = detail::prepare_potential(stream, model, opts.potential_shift, opts.substeps);
    const double kappa = stream.kappa;
    const double d = stream.d;
    // arccot(kappa) in (0, pi)
    const double theta_end = std::atan2(1.0, kappa);

    double qmax = -infinity, qmin = infinity;
    for (double q : pot.q0) {
        qmax = std::max(qmax, q);
        qmin = std::min(qmin, q);
    }

    DispersionSpectrum out;
    out.robin = kappa;
    out.depth = d;
    const std::size_t n_nodes = stream.u.size();
    const int substeps = opts.substeps;

    std::vector<double> phi_cells(pot.cells() + 1), dphi_cells(pot.cells() + 1);

    for (int j = 1; j <= n_eigen; ++j) {
        const double target = theta_end + std::numbers::pi * (j - 1);

        // bracket by phase
        double lo = -(qmax + std::max(kappa, 0.0) * std::max(kappa, 0.0) + 10.0) - 10.0;
        while (detail::pruefer_phase(pot, lo) > target) lo = 2.0 * lo - 10.0;
        const double base = std::numbers::pi * j / d;
        double hi = base * base - qmin + 10.0;
        while (detail::pruefer_phase(pot, hi) < target) hi = 2.0 * hi + 10.0;

        for (int it = 0; it < 48; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (detail::pruefer_phase(pot, mid) < target)
                lo = mid;
            else
                hi = mid;
        }

        // secant on the direct-shoot Robin residual; the phase bracket has
        // isolated the root, so the iteration is local and unclamped
        double a = 0.5 * (lo + hi);
        double b = a + 1e-7 * (1.0 + std::abs(a));
        double fa = detail::robin_residual(pot, kappa, a);
        double fb = detail::robin_residual(pot, kappa, b);
        bool converged = false;
        const double step_cap = 0.5 * base * base + 10.0;
        for (int it = 0; it < opts.max_secant_iters; ++it) {
            const double denom = fb - fa;
            double next;
            if (denom == 0.0 || !std::isfinite(denom))
                next = 0.5 * (a + b);
            else
                next = b - fb * (b - a) / denom;
            if (std::abs(next - b) > step_cap) next = 0.5 * (a + b);
            const double fn = detail::robin_residual(pot, kappa, next);
            a = b;
            fa = fb;
            b = next;
            fb = fn;
            if (std::abs(b - a) <= 1e-15 * (1.0 + std::abs(b))) {
                converged = true;
                break;
            }
        }
        const double mu = b;
        if (!converged && std::abs(b - a) > 1e-11 * (1.0 + std::abs(b)))
            throw convergence_error("solve_spectrum: eigenvalue " + std::to_string(j) +
                                    " did not converge");

        // final shot at the converged eigenvalue, sampled on the stream grid
        double phi_end, dphi_end;
        detail::shoot(pot, mu, phi_end, dphi_end, &phi_cells, &dphi_cells);

        std::vector<double> phi(n_nodes), dphi(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            phi[i] = phi_cells[i * static_cast<std::size_t>(substeps)];
            dphi[i] = dphi_cells[i * static_cast<std::size_t>(substeps)];
        }

        // L2 normalization via composite Gauss-Legendre on the sampled shape
        SampledFunction phi_f(0.0, d, phi);
        const int panels = std::max<int>(16, static_cast<int>(n_nodes) / 32);
        const double norm2 = integrate_composite(
            [&](double z) {
                const double v = phi_f(z);
                return v * v;
            },
            0.0, d, panels, 8);
        const double scale = 1.0 / std::sqrt(norm2);
        for (auto& v : phi) v *= scale;
        for (auto& v : dphi) v *= scale;

        out.mu.push_back(mu);
        out.phi.emplace_back(0.0, d, phi);
        out.phi_z.emplace_back(0.0, d, dphi);
        out.phi_d.push_back(phi.back());
        out.phi_z_d.push_back(dphi.back());
    }

    for (std::size_t j = 1; j < out.mu.size(); ++j)
        if (!(out.mu[j] > out.mu[j - 1]))
            throw convergence_error("solve_spectrum: eigenvalue ordering lost at index " +
                                    std::to_string(j + 1));

    out.n_negative = 0;
    out.strict = true;
    for (double m : out.mu)
        if (m <= 0.0) {
            ++out.n_negative;
            if (m == 0.0) out.strict = false;
        }
    return out;
}

/// N = #{ j : mu_j <= 0 }, with a strict-negativity predicate alongside
/// (the symmetry scan requires all counted eigenvalues strictly negative).
/// Errors out if the ladder is too short to certify N (the last computed
/// eigenvalue is still <= 0).
inline NonpositiveCount count_nonpositive(const DispersionSpectrum& spec) {
    if (spec.mu.empty()) throw error("count_nonpositive: empty spectrum");
    if (spec.mu.back() <= 0.0)
        throw error("count_nonpositive: ladder too short, mu_" + std::to_string(spec.mu.size()) +
                    " <= 0; increase n_eigen");
    NonpositiveCount c;
    for (double m : spec.mu)
        if (m <= 0.0) {
            ++c.n;
            if (m == 0.0) c.strict = false;
        }
    return c;
}

} // namespace crestline

#endif
