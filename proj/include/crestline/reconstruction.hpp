#ifndef CRESTLINE_RECONSTRUCTION_HPP
#define CRESTLINE_RECONSTRUCTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "crestline/dynamics.hpp"
#include "crestline/errors.hpp"
#include "crestline/grid.hpp"
#include "crestline/reduction.hpp"

namespace crestline {

/// Physical wave fields recovered from a reduced trajectory: the free
/// surface eta(x), the rectified-strip fields Phi, Psi with analytic
/// z-derivatives, and the un-rectified stream function psi(X, Y) on a fixed
/// Y grid.  Matrices are row-major with the z (or Y) index contiguous.
struct WaveFields {
    std::vector<double> x;                 // uniform samples
    std::vector<double> z;                 // uniform rectified grid on [0, d]
    std::vector<double> eta;               // per x
    std::vector<double> zeta_x;            // per x, from the analytic surface relation
    std::vector<double> Phi, Phi_z, Phi_zz, Psi; // [ix][iz]
    std::vector<double> Phi_z_surface, Psi_surface; // exact endpoint values per x
    std::vector<double> Y;                 // uniform on [0, min eta]
    std::vector<double> psi_physical;      // [ix][iY]

    std::size_t nx() const { return x.size(); }
    std::size_t nz() const { return z.size(); }
    double at(const std::vector<double>& mat, std::size_t ix, std::size_t iz) const {
        return mat[ix * nz() + iz];
    }
};

/// Rebuild the physical fields of a trajectory on an n_z-point rectified
/// grid:
///   Phi = u + phi - z u_z phi(d)/(kd),  Psi = psi,  eta = d + zeta,
/// with phi, psi the modal sums and all z-derivatives taken analytically
/// (phi_j'' from the eigen-equation, u''' = -omega'(u) u').
inline WaveFields reconstruct(const ReducedModel& model, const Trajectory& traj, int n_z = 129) {
    if (traj.size() < 5) throw error("reconstruct: trajectory too short");
    const int n = model.n_modes();
    const StreamSolution& stream = model.stream();
    const VorticityModel& vort = model.vorticity();
    const double d = stream.d, k = stream.k;

    WaveFields w;
    w.x = traj.x;
    const std::size_t nx = w.x.size();
    const std::size_t nz = static_cast<std::size_t>(n_z);
    w.z.resize(nz);
    for (std::size_t m = 0; m < nz; ++m)
        w.z[m] = d * static_cast<double>(m) / static_cast<double>(nz - 1);

    // per-node stream and mode samples
    std::vector<double> u(nz), uz(nz), uzz(nz), uzzz(nz), wp(nz);
    for (std::size_t m = 0; m < nz; ++m) {
        const double zm = w.z[m];
        u[m] = stream.u(zm);
        uz[m] = stream.u_z(zm);
        uzz[m] = -vort.omega(u[m]);
        wp[m] = vort.omega_prime(u[m]);
        uzzz[m] = -wp[m] * uz[m];
    }
    u[0] = 0.0;
    u[nz - 1] = 1.0;
    std::vector<std::vector<double>> pj(static_cast<std::size_t>(n)),
        pzj(static_cast<std::size_t>(n)), pzzj(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto& a = pj[static_cast<std::size_t>(j)];
        auto& b = pzj[static_cast<std::size_t>(j)];
        auto& c = pzzj[static_cast<std::size_t>(j)];
        a.resize(nz);
        b.resize(nz);
        c.resize(nz);
        const double mu_j = model.mu()[static_cast<std::size_t>(j)];
        for (std::size_t m = 0; m < nz; ++m) {
            a[m] = model.phi_mode(j)(w.z[m]);
            b[m] = model.phi_z_mode(j)(w.z[m]);
            c[m] = -(wp[m] + mu_j) * a[m];
        }
        a[0] = 0.0; // phi_j(0) = 0 exactly
        a[nz - 1] = model.phi_at_surface(j);
        b[nz - 1] = model.phi_z_at_surface(j);
    }

    w.eta.resize(nx);
    w.zeta_x.resize(nx);
    w.Phi.resize(nx * nz);
    w.Phi_z.resize(nx * nz);
    w.Phi_zz.resize(nx * nz);
    w.Psi.resize(nx * nz);
    w.Phi_z_surface.resize(nx);
    w.Psi_surface.resize(nx);

    const double omega1 = vort.omega(1.0);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const ReducedState& st = traj.states[ix];
        double zeta, zeta_x;
        model.surface_values(st, zeta, zeta_x);
        const double eta = d + zeta;
        if (!(eta > 0.5 * d))
            throw surface_error("reconstruct: surface collapse, eta <= d/2 at x = " +
                                std::to_string(w.x[ix]));
        w.eta[ix] = eta;
        w.zeta_x[ix] = zeta_x;

        double phi_d = 0.0, phiz_d = 0.0, psi_d = 0.0;
        for (int j = 0; j < n; ++j) {
            phi_d += st.alpha[static_cast<std::size_t>(j)] * model.phi_at_surface(j);
            phiz_d += st.alpha[static_cast<std::size_t>(j)] * model.phi_z_at_surface(j);
            psi_d += st.beta[static_cast<std::size_t>(j)] * model.phi_at_surface(j);
        }
        const double shift = phi_d / (k * d);
        for (std::size_t m = 0; m < nz; ++m) {
            double phi = 0.0, phiz = 0.0, phizz = 0.0, psi = 0.0;
            for (int j = 0; j < n; ++j) {
                const double aj = st.alpha[static_cast<std::size_t>(j)];
                const double bj = st.beta[static_cast<std::size_t>(j)];
                phi += aj * pj[static_cast<std::size_t>(j)][m];
                phiz += aj * pzj[static_cast<std::size_t>(j)][m];
                phizz += aj * pzzj[static_cast<std::size_t>(j)][m];
                psi += bj * pj[static_cast<std::size_t>(j)][m];
            }
            const double zm = w.z[m];
            const std::size_t idx = ix * nz + m;
            w.Phi[idx] = u[m] + phi - zm * uz[m] * shift;
            w.Phi_z[idx] = uz[m] + phiz - (uz[m] + zm * uzz[m]) * shift;
            w.Phi_zz[idx] = uzz[m] + phizz - (2.0 * uzz[m] + zm * uzzz[m]) * shift;
            w.Psi[idx] = psi;
        }
        w.Phi_z_surface[ix] = k + phiz_d - (k - d * omega1) * shift;
        w.Psi_surface[ix] = psi_d;
    }

    // un-rectification on a fixed Y grid up to the lowest surface point
    const double y_max = *std::min_element(w.eta.begin(), w.eta.end());
    w.Y.resize(nz);
    for (std::size_t m = 0; m < nz; ++m)
        w.Y[m] = y_max * static_cast<double>(m) / static_cast<double>(nz - 1);
    w.psi_physical.resize(nx * nz);
    const double hz = d / static_cast<double>(nz - 1);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        // cubic interpolation along the contiguous column
        const double* col = w.Phi.data() + ix * nz;
        std::vector<double> column(col, col + nz);
        for (std::size_t m = 0; m < nz; ++m) {
            const double zq = d * w.Y[m] / w.eta[ix];
            w.psi_physical[ix * nz + m] = interp_uniform(column, 0.0, hz, zq);
        }
    }
    return w;
}

/// Max over x of |Psi(x,d)^2 + Phi_z(x,d)^2 - P(eta(x))|.
inline double bernoulli_residual(const WaveFields& w, const ReducedModel& model) {
    double worst = 0.0;
    for (std::size_t ix = 0; ix < w.nx(); ++ix) {
        const double lhs = w.Psi_surface[ix] * w.Psi_surface[ix] +
                           w.Phi_z_surface[ix] * w.Phi_z_surface[ix];
        worst = std::max(worst, std::abs(lhs - model.bernoulli_profile(w.eta[ix])));
    }
    return worst;
}

/// Max-norm residual of the rectified interior equation
///   [Phi_x - (z eta_x/eta) Phi_z]_x - (z eta_x/eta) [.]_z
///     + (d/eta)^2 Phi_zz + omega(Phi) = 0
/// with all x-derivatives (including eta_x) by centered differences and all
/// z-derivatives analytic.
inline double field_residual(const WaveFields& w, const ReducedModel& model) {
    const std::size_t nx = w.nx(), nz = w.nz();
    if (nx < 5) throw error("field_residual: need at least 5 x samples");
    const double dx = w.x[1] - w.x[0];
    const double d = model.stream().d;
    const VorticityModel& vort = model.vorticity();

    std::vector<double> eta_x(nx, 0.0);
    for (std::size_t i = 1; i + 1 < nx; ++i)
        eta_x[i] = (w.eta[i + 1] - w.eta[i - 1]) / (2.0 * dx);

    // V = Phi_x - (z eta_x / eta) Phi_z on interior columns
    std::vector<double> V(nx * nz, 0.0), Vz(nx * nz, 0.0);
    for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double g = eta_x[i] / w.eta[i];
        for (std::size_t m = 0; m < nz; ++m) {
            const std::size_t idx = i * nz + m;
            const double phi_x =
                (w.Phi[(i + 1) * nz + m] - w.Phi[(i - 1) * nz + m]) / (2.0 * dx);
            const double phi_xz =
                (w.Phi_z[(i + 1) * nz + m] - w.Phi_z[(i - 1) * nz + m]) / (2.0 * dx);
            V[idx] = phi_x - w.z[m] * g * w.Phi_z[idx];
            Vz[idx] = phi_xz - g * w.Phi_z[idx] - w.z[m] * g * w.Phi_zz[idx];
        }
    }

    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < nx; ++i) {
        const double g = eta_x[i] / w.eta[i];
        const double stretch = (d / w.eta[i]) * (d / w.eta[i]);
        for (std::size_t m = 0; m < nz; ++m) {
            const std::size_t idx = i * nz + m;
            const double v_x = (V[(i + 1) * nz + m] - V[(i - 1) * nz + m]) / (2.0 * dx);
            const double r =
                v_x - w.z[m] * g * Vz[idx] + stretch * w.Phi_zz[idx] + vort.omega(w.Phi[idx]);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

} // namespace crestline

#endif
