#ifndef CRESTLINE_REDUCTION_HPP
#define CRESTLINE_REDUCTION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "crestline/dispersion.hpp"
#include "crestline/errors.hpp"
#include "crestline/quadrature.hpp"
#include "crestline/stream.hpp"
#include "crestline/vorticity.hpp"

namespace crestline {

/// Modal coordinates (alpha, beta) of the reduced 2N-dimensional system.
struct ReducedState {
    std::vector<double> alpha;
    std::vector<double> beta;

    static ReducedState zeros(int n) {
        return {std::vector<double>(static_cast<std::size_t>(n), 0.0),
                std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    }
};

/// Modal sums and surface data of a state, sampled on the model quadrature:
/// phi = sum alpha_j phi_j (with z-derivatives up to second order),
/// psi = sum beta_j phi_j (with first derivative), and the surface pair
/// (zeta, zeta_x).
struct ModalFields {
    std::vector<double> phi, phi_z, phi_zz;
    std::vector<double> psi, psi_z;
    double phi_surface = 0.0;   // phi(d)
    double phi_z_surface = 0.0; // phi_z(d)
    double psi_surface = 0.0;   // psi(d)
    double zeta = 0.0;
    double zeta_x = 0.0;
};

/// Pointwise nonlinear densities and the resolved boundary density.
struct NonlinearDensities {
    std::vector<double> n1, n2; // on the quadrature nodes
    double n3 = 0.0;            // boundary value at z = d (phi_z slot = kappa phi)
};

struct GalerkinRhs {
    std::vector<double> f1, f2;
};

/// Physical column (Phi, Psi, eta) sampled on the model quadrature, the
/// argument of the flow force.
struct FlowColumn {
    double eta = 0.0;
    std::vector<double> Phi, Phi_z, Psi;
};

struct HamiltonianValue {
    double value = 0.0;     // s(alpha, beta) = S on the reconstructed column
    double quadratic = 0.0; // S0 + (1/2) sum mu_j alpha_j^2 - (1/2) sum beta_j^2
};

/// Reusable buffers for repeated vector-field evaluation (one per thread).
struct ReducedWorkspace {
    ModalFields fields;
    NonlinearDensities densities;
    GalerkinRhs rhs;
};

/// Everything needed to evaluate the reduced vector field: the stream, the
/// first N dispersion modes re-normalized against the model quadrature, the
/// quadrature itself, and per-node caches of u, u', u'' and phi_j, phi_j',
/// phi_j''.  phi_j'' comes from the eigen-equation
/// phi_j'' = -(omega'(u) + mu_j) phi_j, not from differencing.
///
/// Immutable after build; vector-field evaluation is pure and reentrant.
class ReducedModel {
  public:
    ReducedModel() = default;

    ReducedModel(const StreamSolution& stream, const VorticityModel& vorticity,
                 const DispersionSpectrum& spectrum, int n_modes, int quad_panels = 64,
                 int quad_order = 8)
        : stream_(stream), vorticity_(vorticity) {
        const NonpositiveCount count = count_nonpositive(spectrum);
        if (n_modes <= 0) n_modes = count.n;
        if (n_modes <= 0)
            throw error("ReducedModel: no non-positive eigenvalues; nothing to reduce onto");
        if (n_modes > count.n)
            throw error("ReducedModel: requested " + std::to_string(n_modes) +
                        " modes but only " + std::to_string(count.n) + " are non-positive");
        n_ = n_modes;
        strict_ = count.strict;

        quad_ = Quadrature::composite(0.0, stream.d, quad_panels, quad_order);
        const std::size_t m = quad_.nodes.size();
        uq_.resize(m);
        uzq_.resize(m);
        uzzq_.resize(m);
        wpq_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double z = quad_.nodes[i];
            uq_[i] = stream.u(z);
            uzq_[i] = stream.u_z(z);
            uzzq_[i] = -vorticity.omega(uq_[i]);
            wpq_[i] = vorticity.omega_prime(uq_[i]);
        }

        mu_.assign(spectrum.mu.begin(), spectrum.mu.begin() + n_);
        phi_modes_.assign(spectrum.phi.begin(), spectrum.phi.begin() + n_);
        phi_z_modes_.assign(spectrum.phi_z.begin(), spectrum.phi_z.begin() + n_);
        phi_d_.assign(spectrum.phi_d.begin(), spectrum.phi_d.begin() + n_);
        phi_z_d_.assign(spectrum.phi_z_d.begin(), spectrum.phi_z_d.begin() + n_);

        phiq_.resize(static_cast<std::size_t>(n_));
        phizq_.resize(static_cast<std::size_t>(n_));
        phizzq_.resize(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) {
            auto& pj = phiq_[static_cast<std::size_t>(j)];
            auto& pzj = phizq_[static_cast<std::size_t>(j)];
            auto& pzzj = phizzq_[static_cast<std::size_t>(j)];
            pj.resize(m);
            pzj.resize(m);
            pzzj.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const double z = quad_.nodes[i];
                pj[i] = phi_modes_[static_cast<std::size_t>(j)](z);
                pzj[i] = phi_z_modes_[static_cast<std::size_t>(j)](z);
            }
            // renormalize against this quadrature so the Gram matrix is the
            // identity on the diagonal by construction
            double norm2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) norm2 += quad_.weights[i] * pj[i] * pj[i];
            const double scale = 1.0 / std::sqrt(norm2);
            for (std::size_t i = 0; i < m; ++i) {
                pj[i] *= scale;
                pzj[i] *= scale;
            }
            for (auto& v : phi_modes_[static_cast<std::size_t>(j)].values) v *= scale;
            for (auto& v : phi_z_modes_[static_cast<std::size_t>(j)].values) v *= scale;
            phi_d_[static_cast<std::size_t>(j)] *= scale;
            phi_z_d_[static_cast<std::size_t>(j)] *= scale;
            const double mu_j = mu_[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < m; ++i) pzzj[i] = -(wpq_[i] + mu_j) * pj[i];
        }

        // orthonormality defect of the quadrature + modes
        double defect = 0.0;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) {
                double g = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    g += quad_.weights[i] * phiq_[static_cast<std::size_t>(a)][i] *
                         phiq_[static_cast<std::size_t>(b)][i];
                defect = std::max(defect, std::abs(g - (a == b ? 1.0 : 0.0)));
            }
        if (defect > 1e-8)
            throw convergence_error("ReducedModel: quadrature orthonormality defect " +
                                    std::to_string(defect) + " exceeds 1e-8");

        omega1_ = vorticity.omega(1.0);
        Omega1_ = vorticity.primitive(1.0);
        S0_ = flow_force_on(stream_column());
    }

    int n_modes() const { return n_; }
    bool strict_negative() const { return strict_; }
    const std::vector<double>& mu() const { return mu_; }
    const StreamSolution& stream() const { return stream_; }
    const VorticityModel& vorticity() const { return vorticity_; }
    const Quadrature& quadrature() const { return quad_; }
    double S0() const { return S0_; }
    const std::vector<double>& phi_at_nodes(int j) const { return phiq_[static_cast<std::size_t>(j)]; }
    const SampledFunction& phi_mode(int j) const { return phi_modes_[static_cast<std::size_t>(j)]; }
    const SampledFunction& phi_z_mode(int j) const { return phi_z_modes_[static_cast<std::size_t>(j)]; }
    double phi_at_surface(int j) const { return phi_d_[static_cast<std::size_t>(j)]; }
    double phi_z_at_surface(int j) const { return phi_z_d_[static_cast<std::size_t>(j)]; }

    /// Bernoulli profile P(t) = t^2 (3r - 2t) / d^2.
    double bernoulli_profile(double t) const {
        const double d = stream_.d, r = stream_.r;
        return t * t * (3.0 * r - 2.0 * t) / (d * d);
    }

    /// Surface pair (zeta, zeta_x) from raw modal coefficients.
    ///   zeta   = -phi(d)/k,
    ///   zeta_x = -psi(d) / (k + phi_z(d) - [1/d - omega(1)/k] phi(d)).
    void surface_values_raw(const double* alpha, const double* beta, double& zeta,
                            double& zeta_x) const {
        const double k = stream_.k, d = stream_.d;
        double phi_d = 0.0, phiz_d = 0.0, psi_d = 0.0;
        for (int j = 0; j < n_; ++j) {
            phi_d += alpha[j] * phi_d_[static_cast<std::size_t>(j)];
            phiz_d += alpha[j] * phi_z_d_[static_cast<std::size_t>(j)];
            psi_d += beta[j] * phi_d_[static_cast<std::size_t>(j)];
        }
        zeta = -phi_d / k;
        const double denom = k + phiz_d - (1.0 / d - omega1_ / k) * phi_d;
        if (std::abs(denom) < 0.5 * std::abs(k))
            throw surface_error("surface_values: Bernoulli denominator " + std::to_string(denom) +
                                " too close to 0 (|.| < |k|/2)");
        zeta_x = -psi_d / denom;
    }

    void surface_values(const ReducedState& st, double& zeta, double& zeta_x) const {
        surface_values_raw(st.alpha.data(), st.beta.data(), zeta, zeta_x);
    }

    /// Modal sums on the quadrature nodes plus surface data.
    void assemble_into(const double* alpha, const double* beta, ModalFields& f) const {
        const std::size_t m = quad_.nodes.size();
        f.phi.assign(m, 0.0);
        f.phi_z.assign(m, 0.0);
        f.phi_zz.assign(m, 0.0);
        f.psi.assign(m, 0.0);
        f.psi_z.assign(m, 0.0);
        f.phi_surface = f.phi_z_surface = f.psi_surface = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double aj = alpha[j];
            const double bj = beta[j];
            const auto& pj = phiq_[static_cast<std::size_t>(j)];
            const auto& pzj = phizq_[static_cast<std::size_t>(j)];
            const auto& pzzj = phizzq_[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < m; ++i) {
                f.phi[i] += aj * pj[i];
                f.phi_z[i] += aj * pzj[i];
                f.phi_zz[i] += aj * pzzj[i];
                f.psi[i] += bj * pj[i];
                f.psi_z[i] += bj * pzj[i];
            }
            f.phi_surface += aj * phi_d_[static_cast<std::size_t>(j)];
            f.phi_z_surface += aj * phi_z_d_[static_cast<std::size_t>(j)];
            f.psi_surface += bj * phi_d_[static_cast<std::size_t>(j)];
        }
        surface_values_raw(alpha, beta, f.zeta, f.zeta_x);
    }

    ModalFields assemble(const ReducedState& st) const {
        ModalFields f;
        assemble_into(st.alpha.data(), st.beta.data(), f);
        return f;
    }

    /// Pointwise densities N1, N2 on the quadrature nodes and the boundary
    /// density N3 with its phi_z slot resolved to kappa*phi(d).
    void densities_into(const ModalFields& f, NonlinearDensities& nd) const {
        const std::size_t m = quad_.nodes.size();
        nd.n1.resize(m);
        nd.n2.resize(m);
        const double d = stream_.d;
        const double zeta = f.zeta, zeta_x = f.zeta_x;
        if (!(d + zeta > 0.5 * d))
            throw surface_error("nonlinear_densities: surface collapse, d + zeta <= d/2");
        const double dpz = d + zeta;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = quad_.nodes[i];
            const double u = uq_[i], uz = uzq_[i], uzz = uzzq_[i];
            const double wp = wpq_[i];
            nd.n1[i] = -zeta * f.psi[i] / dpz +
                       z * zeta_x * (d * f.phi_z[i] + z * zeta * uzz) / (d * dpz);
            const double shift = f.phi[i] + z * uz * zeta / d;
            const double bracket =
                vorticity_.omega(u + shift) - vorticity_.omega(u) - wp * shift;
            nd.n2[i] = zeta_x * (f.psi[i] + z * f.psi_z[i]) / dpz +
                       zeta * (f.phi_zz[i] - wp * f.phi[i] - 2.0 * zeta * z * wp * uz / d) / dpz -
                       (dpz / d) * bracket;
        }
        nd.n3 = boundary_density(f);
    }

    NonlinearDensities nonlinear_densities(const ReducedState& st) const {
        NonlinearDensities nd;
        const ModalFields f = assemble(st);
        densities_into(f, nd);
        return nd;
    }

    /// The Galerkin coefficients of the reduced field:
    ///   f1_j = int N1 phi_j dz,
    ///   f2_j = int N2 phi_j dz - N3 phi_j(d).
    void f0_from(const NonlinearDensities& nd, GalerkinRhs& g) const {
        g.f1.assign(static_cast<std::size_t>(n_), 0.0);
        g.f2.assign(static_cast<std::size_t>(n_), 0.0);
        const std::size_t m = quad_.nodes.size();
        for (int j = 0; j < n_; ++j) {
            const auto& pj = phiq_[static_cast<std::size_t>(j)];
            double a1 = 0.0, a2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                a1 += quad_.weights[i] * nd.n1[i] * pj[i];
                a2 += quad_.weights[i] * nd.n2[i] * pj[i];
            }
            g.f1[static_cast<std::size_t>(j)] = a1;
            g.f2[static_cast<std::size_t>(j)] = a2 - nd.n3 * phi_d_[static_cast<std::size_t>(j)];
        }
    }

    GalerkinRhs f0(const ReducedState& st) const {
        ReducedWorkspace ws;
        const ModalFields f = assemble(st);
        densities_into(f, ws.densities);
        GalerkinRhs g;
        f0_from(ws.densities, g);
        return g;
    }

    /// Flat-state evaluation y = [alpha..., beta...] without allocation;
    /// the workspace persists across calls.
    ///   alpha_j' = beta_j + f1_j;  beta_j' = mu_j alpha_j + f2_j.
    void vector_field_flat(const double* y, double* dy, ReducedWorkspace& ws) const {
        const double* alpha = y;
        const double* beta = y + n_;
        assemble_into(alpha, beta, ws.fields);
        densities_into(ws.fields, ws.densities);
        f0_from(ws.densities, ws.rhs);
        for (int j = 0; j < n_; ++j) {
            dy[j] = beta[j] + ws.rhs.f1[static_cast<std::size_t>(j)];
            dy[n_ + j] = mu_[static_cast<std::size_t>(j)] * alpha[j] +
                         ws.rhs.f2[static_cast<std::size_t>(j)];
        }
    }

    void vector_field(const ReducedState& st, std::vector<double>& alpha_dot,
                      std::vector<double>& beta_dot) const {
        const GalerkinRhs g = f0(st);
        alpha_dot.resize(static_cast<std::size_t>(n_));
        beta_dot.resize(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) {
            alpha_dot[static_cast<std::size_t>(j)] =
                st.beta[static_cast<std::size_t>(j)] + g.f1[static_cast<std::size_t>(j)];
            beta_dot[static_cast<std::size_t>(j)] =
                mu_[static_cast<std::size_t>(j)] * st.alpha[static_cast<std::size_t>(j)] +
                g.f2[static_cast<std::size_t>(j)];
        }
    }

    /// Flow force of a physical column:
    ///   S = [3r/2 + Omega(1)] eta - eta^2/2
    ///       - int_0^d [ (d/(2 eta)) (Psi^2 - Phi_z^2) + (eta/d) Omega(Phi) ] dz.
    double flow_force_on(const FlowColumn& c) const {
        const double d = stream_.d, r = stream_.r;
        const double eta = c.eta;
        if (!(eta > 0.0)) throw surface_error("flow_force: eta must be positive");
        double integral = 0.0;
        const std::size_t m = quad_.nodes.size();
        for (std::size_t i = 0; i < m; ++i) {
            const double term = (d / (2.0 * eta)) * (c.Psi[i] * c.Psi[i] - c.Phi_z[i] * c.Phi_z[i]) +
                                (eta / d) * vorticity_.primitive(c.Phi[i]);
            integral += quad_.weights[i] * term;
        }
        return (1.5 * r + Omega1_) * eta - 0.5 * eta * eta - integral;
    }

    /// The column of the unperturbed stream (Phi = u, Psi = 0, eta = d).
    FlowColumn stream_column() const {
        FlowColumn c;
        c.eta = stream_.d;
        c.Phi = uq_;
        c.Phi_z = uzq_;
        c.Psi.assign(uq_.size(), 0.0);
        return c;
    }

    /// The reconstructed column of a state (the manifold ansatz with the
    /// infinite part set to zero):
    ///   Phi = u + phi - z u_z phi(d)/(kd),  Psi = psi,  eta = d + zeta.
    FlowColumn state_column(const ReducedState& st) const {
        const ModalFields f = assemble(st);
        FlowColumn c;
        const std::size_t m = quad_.nodes.size();
        const double d = stream_.d, k = stream_.k;
        const double shift = f.phi_surface / (k * d);
        c.eta = d + f.zeta;
        c.Phi.resize(m);
        c.Phi_z.resize(m);
        c.Psi.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double z = quad_.nodes[i];
            c.Phi[i] = uq_[i] + f.phi[i] - z * uzq_[i] * shift;
            c.Phi_z[i] = uzq_[i] + f.phi_z[i] - (uzq_[i] + z * uzzq_[i]) * shift;
            c.Psi[i] = f.psi[i];
        }
        return c;
    }

    /// Reduced Hamiltonian: the flow force on the reconstructed column, and
    /// its closed-form quadratic part.
    HamiltonianValue hamiltonian(const ReducedState& st) const {
        HamiltonianValue h;
        h.value = flow_force_on(state_column(st));
        double quad = S0_;
        for (int j = 0; j < n_; ++j) {
            const double a = st.alpha[static_cast<std::size_t>(j)];
            const double b = st.beta[static_cast<std::size_t>(j)];
            quad += 0.5 * mu_[static_cast<std::size_t>(j)] * a * a - 0.5 * b * b;
        }
        h.quadratic = quad;
        return h;
    }

    /// zeta of a state (surface elevation offset), used by trajectory
    /// diagnostics.
    double zeta_of(const ReducedState& st) const {
        double phi_d = 0.0;
        for (int j = 0; j < n_; ++j)
            phi_d += st.alpha[static_cast<std::size_t>(j)] * phi_d_[static_cast<std::size_t>(j)];
        return -phi_d / stream_.k;
    }

  private:
    /// N3 at z = d with the phi_z slot resolved to kappa phi(d):
    ///   N3 = (1/2k) [ -(psi(d)^2 + (kappa phi(d) + (z u_z)_z|_d zeta/d)^2)
    ///                 + P(d+zeta) - P(d) - P'(d) zeta ].
    /// The P-combination is expanded exactly: zeta^2 (3r - 6d - 2 zeta)/d^2.
    double boundary_density(const ModalFields& f) const {
        const double d = stream_.d, k = stream_.k, r = stream_.r, kappa = stream_.kappa;
        const double zeta = f.zeta;
        const double zuz_z_d = k - d * omega1_; // (z u_z)_z at z = d via u'' = -omega(u)
        const double slot = kappa * f.phi_surface + zuz_z_d * zeta / d;
        const double p_combo = zeta * zeta * (3.0 * r - 6.0 * d - 2.0 * zeta) / (d * d);
        return (0.5 / k) * (-(f.psi_surface * f.psi_surface + slot * slot) + p_combo);
    }

    StreamSolution stream_;
    VorticityModel vorticity_;
    int n_ = 0;
    bool strict_ = true;
    std::vector<double> mu_;
    Quadrature quad_;
    std::vector<double> uq_, uzq_, uzzq_, wpq_;
    std::vector<std::vector<double>> phiq_, phizq_, phizzq_;
    std::vector<SampledFunction> phi_modes_, phi_z_modes_;
    std::vector<double> phi_d_, phi_z_d_;
    double omega1_ = 0.0; // omega(1)
    double Omega1_ = 0.0; // Omega(1)
    double S0_ = 0.0;
};

/// Free-function counterparts of the member operations.
inline void surface_values(const ReducedModel& m, const ReducedState& st, double& zeta,
                           double& zeta_x) {
    m.surface_values(st, zeta, zeta_x);
}
inline double bernoulli_profile(const ReducedModel& m, double t) { return m.bernoulli_profile(t); }
inline NonlinearDensities nonlinear_densities(const ReducedModel& m, const ReducedState& st) {
    return m.nonlinear_densities(st);
}
inline GalerkinRhs f0(const ReducedModel& m, const ReducedState& st) { return m.f0(st); }
inline double flow_force(const ReducedModel& m, const FlowColumn& c) { return m.flow_force_on(c); }
inline HamiltonianValue hamiltonian(const ReducedModel& m, const ReducedState& st) {
    return m.hamiltonian(st);
}

} // namespace crestline

#endif
