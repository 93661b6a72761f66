#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "crestline/reduction.hpp"
#include "oracles.hpp"

using namespace crestline;

namespace {

ReducedModel model_b1() { // N = 1, d = 1, k = 0.5, kappa = 2
    static const ReducedModel m = [] {
        const VorticityModel vort = VorticityModel::constant(1.0);
        const auto stream = build_stream(vort, 1.5, {+1, 0});
        const auto spec = solve_spectrum(stream, vort, 6);
        return ReducedModel(stream, vort, spec, 0);
    }();
    return m;
}

ReducedModel model_irrotational() { // N = 1, d = 2, kappa = 4
    static const ReducedModel m = [] {
        const VorticityModel vort = VorticityModel::zero();
        const auto stream = build_stream(vort, 0.5, {+1, 0});
        const auto spec = solve_spectrum(stream, vort, 6);
        return ReducedModel(stream, vort, spec, 0);
    }();
    return m;
}

ReducedState random_state(int n, double amp, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ReducedState st = ReducedState::zeros(n);
    for (auto& v : st.alpha) v = amp * u(rng);
    for (auto& v : st.beta) v = amp * u(rng);
    return st;
}

} // namespace

TEST_CASE("model quadrature reproduces orthonormality", "[reduction]") {
    const ReducedModel m = model_b1();
    CHECK(m.n_modes() == 1);
    const auto& q = m.quadrature();
    double g = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        g += q.weights[i] * m.phi_at_nodes(0)[i] * m.phi_at_nodes(0)[i];
    CHECK(g == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("surface values", "[reduction]") {
    const ReducedModel m = model_b1();
    SECTION("equilibrium") {
        double zeta, zeta_x;
        m.surface_values(ReducedState::zeros(1), zeta, zeta_x);
        CHECK(zeta == 0.0);
        CHECK(zeta_x == 0.0);
    }
    SECTION("zeta = -phi(d)/k and pure-psi slope") {
        ReducedState st = ReducedState::zeros(1);
        st.alpha[0] = 0.01 / m.phi_at_surface(0); // phi(d) = 0.01
        double zeta, zeta_x;
        m.surface_values(st, zeta, zeta_x);
        CHECK(zeta == Catch::Approx(-0.02).margin(1e-15));

        ReducedState sb = ReducedState::zeros(1);
        sb.beta[0] = 0.001 / m.phi_at_surface(0); // psi(d) = 0.001
        m.surface_values(sb, zeta, zeta_x);
        CHECK(zeta == 0.0);
        CHECK(zeta_x == Catch::Approx(-0.002).margin(1e-15));
    }
}

TEST_CASE("Bernoulli profile", "[reduction]") {
    const ReducedModel m = model_b1();
    const double d = m.stream().d, k = m.stream().k;
    CHECK(m.bernoulli_profile(0.0) == 0.0);
    // P(d) = 3r - 2d = k^2
    CHECK(m.bernoulli_profile(d) == Catch::Approx(k * k).margin(1e-9));
    CHECK(m.bernoulli_profile(1.0) == Catch::Approx(0.25).margin(1e-9));
}

TEST_CASE("densities vanish at the origin", "[reduction]") {
    const ReducedModel m = model_b1();
    const auto nd = m.nonlinear_densities(ReducedState::zeros(1));
    for (double v : nd.n1) CHECK(v == 0.0);
    for (double v : nd.n2) CHECK(v == 0.0);
    CHECK(nd.n3 == 0.0);
}

TEST_CASE("densities scale quadratically", "[reduction]") {
    const ReducedModel m = model_b1();
    std::mt19937_64 rng(3);
    const ReducedState dir = random_state(1, 1.0, rng);
    std::vector<double> scaled;
    for (double t : {1e-2, 1e-3, 1e-4}) {
        ReducedState st;
        st.alpha = {t * dir.alpha[0]};
        st.beta = {t * dir.beta[0]};
        const auto nd = m.nonlinear_densities(st);
        double mag = std::abs(nd.n3);
        for (std::size_t i = 0; i < nd.n1.size(); ++i)
            mag = std::max({mag, std::abs(nd.n1[i]), std::abs(nd.n2[i])});
        scaled.push_back(mag / (t * t));
    }
    CHECK(scaled[1] == Catch::Approx(scaled[2]).epsilon(0.05));
    CHECK(scaled[0] == Catch::Approx(scaled[2]).epsilon(0.5));
}

TEST_CASE("omega bracket in N2", "[reduction]") {
    SECTION("vanishes identically for zero vorticity") {
        const ReducedModel m = model_irrotational();
        ReducedState st = ReducedState::zeros(1);
        st.alpha[0] = 1e-3;
        st.beta[0] = 2e-3;
        const auto nd = m.nonlinear_densities(st);
        // with omega = 0 the N2 density reduces to the two explicit terms;
        // evaluate them directly and compare
        const auto f = m.assemble(st);
        const auto& q = m.quadrature();
        const double d = m.stream().d;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double z = q.nodes[i];
            const double expect = f.zeta_x * (f.psi[i] + z * f.psi_z[i]) / (d + f.zeta) +
                                  f.zeta * f.phi_zz[i] / (d + f.zeta);
            CHECK(nd.n2[i] == Catch::Approx(expect).margin(1e-18));
        }
    }
    SECTION("equals the exact Taylor remainder for quadratic vorticity") {
        const VorticityModel vort = VorticityModel::polynomial({0.0, 0.0, 1.0}); // omega = p^2
        const double c2 = 1.0;
        const double X = 0.05, u = 0.3;
        const double bracket = vort.omega(u + X) - vort.omega(u) - vort.omega_prime(u) * X;
        CHECK(bracket == Catch::Approx(c2 * X * X).margin(1e-15));
    }
}

TEST_CASE("f0 parities in beta", "[reduction]") {
    const ReducedModel m = model_b1();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const ReducedState st = random_state(1, 1e-3, rng);
        ReducedState flipped = st;
        for (auto& v : flipped.beta) v = -v;
        const auto g = m.f0(st);
        const auto gf = m.f0(flipped);
        for (int j = 0; j < 1; ++j) {
            // bitwise parity: f1 odd, f2 even
            CHECK(gf.f1[static_cast<std::size_t>(j)] == -g.f1[static_cast<std::size_t>(j)]);
            CHECK(gf.f2[static_cast<std::size_t>(j)] == g.f2[static_cast<std::size_t>(j)]);
        }
    }
}

TEST_CASE("f0 vanishes at the origin and scales quadratically", "[reduction]") {
    const ReducedModel m = model_b1();
    const auto g0 = m.f0(ReducedState::zeros(1));
    CHECK(g0.f1[0] == 0.0);
    CHECK(g0.f2[0] == 0.0);

    std::mt19937_64 rng(5);
    const ReducedState dir = random_state(1, 1.0, rng);
    std::vector<double> ratio;
    for (double t : {1e-2, 1e-3, 1e-4}) {
        ReducedState st;
        st.alpha = {t * dir.alpha[0]};
        st.beta = {t * dir.beta[0]};
        const auto g = m.f0(st);
        ratio.push_back(std::hypot(g.f1[0], g.f2[0]) / (t * t));
    }
    CHECK(ratio[1] == Catch::Approx(ratio[2]).epsilon(0.05));
}

TEST_CASE("vector field linearization at the origin", "[reduction]") {
    const ReducedModel m = model_b1();
    const double mu1 = m.mu()[0];
    const double delta = 1e-6;
    // finite-difference Jacobian must be [[0, 1], [mu_1, 0]]
    std::vector<double> ap, am, bp, bm;
    ReducedState st = ReducedState::zeros(1);

    st.alpha[0] = delta;
    m.vector_field(st, ap, bp);
    st.alpha[0] = -delta;
    m.vector_field(st, am, bm);
    const double j11 = (ap[0] - am[0]) / (2 * delta);
    const double j21 = (bp[0] - bm[0]) / (2 * delta);

    st.alpha[0] = 0.0;
    st.beta[0] = delta;
    m.vector_field(st, ap, bp);
    st.beta[0] = -delta;
    m.vector_field(st, am, bm);
    const double j12 = (ap[0] - am[0]) / (2 * delta);
    const double j22 = (bp[0] - bm[0]) / (2 * delta);

    CHECK(std::abs(j11) < 1e-6);
    CHECK(j12 == Catch::Approx(1.0).margin(1e-6));
    CHECK(j21 == Catch::Approx(mu1).margin(1e-6));
    CHECK(std::abs(j22) < 1e-6);
}

TEST_CASE("quadratic smallness of f0 against the linear part", "[reduction]") {
    // alpha = eps, beta = 0: the corrections beyond (beta, mu alpha) are
    // O(eps^2) -- subdominant at eps = 1e-3 and 100x smaller at eps = 1e-4
    const ReducedModel m = model_b1();
    std::vector<double> ad, bd;
    ReducedState st = ReducedState::zeros(1);
    st.alpha[0] = 1e-3;
    m.vector_field(st, ad, bd);
    const double c1 = std::abs(ad[0]);
    const double c2 = std::abs(bd[0] - m.mu()[0] * 1e-3);
    CHECK(c1 < 0.1 * std::abs(m.mu()[0]) * 1e-3);
    CHECK(c2 < 0.1 * std::abs(m.mu()[0]) * 1e-3);
    st.alpha[0] = 1e-4;
    m.vector_field(st, ad, bd);
    CHECK(std::abs(ad[0]) <= 0.02 * c1); // both sides vanish: f1 is odd in beta
    CHECK(std::abs(bd[0] - m.mu()[0] * 1e-4) < 0.02 * c2);
}

TEST_CASE("flow force of the pure stream", "[reduction]") {
    SECTION("irrotational closed form S0 = s + 1/(2 s^2)") {
        // u = sY, d = 1/s, r = (s^2 + 2d)/3:
        //   S0 = (3r/2) d - d^2/2 + int_0^d s^2/2 dz = s + 1/(2 s^2),
        // which gives the sanity value 3/2 at s = 1
        const ReducedModel m = model_irrotational(); // s = 0.5
        CHECK(m.S0() == Catch::Approx(0.5 + 2.0).margin(1e-10));
    }
    SECTION("stored S0 equals flow force of the stream column") {
        const ReducedModel m = model_b1();
        CHECK(m.flow_force_on(m.stream_column()) == m.S0());
    }
    SECTION("first variation vanishes at the stream") {
        const ReducedModel m = model_b1();
        std::mt19937_64 rng(23);
        std::vector<double> gap;
        for (double eps : {1e-3, 1e-4}) {
            ReducedState st = ReducedState::zeros(1);
            st.alpha[0] = eps;
            gap.push_back(std::abs(m.hamiltonian(st).value - m.S0()));
        }
        // quadratic, not linear, in the perturbation
        CHECK(gap[1] < gap[0] * 0.02);
    }
}

TEST_CASE("hamiltonian quadratic part", "[reduction]") {
    const ReducedModel m = model_b1();
    const double mu1 = m.mu()[0];
    SECTION("value at origin is S0 exactly") {
        const auto h = m.hamiltonian(ReducedState::zeros(1));
        CHECK(h.value == m.S0());
        CHECK(h.quadratic == m.S0());
    }
    SECTION("ratio (s - S0)/(mu eps^2/2) approaches 1") {
        // the cubic coefficient of this test is smallest on the irrotational
        // stream; the rotational one is exercised by the limit check below
        const ReducedModel mi = model_irrotational();
        double ratio_prev = 0.0;
        for (double eps : {1e-2, 1e-3}) {
            ReducedState st = ReducedState::zeros(1);
            st.alpha[0] = eps;
            const auto h = mi.hamiltonian(st);
            const double ratio = (h.value - mi.S0()) / (0.5 * mi.mu()[0] * eps * eps);
            if (eps == 1e-2) {
                CHECK(std::abs(ratio - 1.0) < 0.05);
                ratio_prev = ratio;
            } else {
                CHECK(std::abs(ratio - 1.0) < 0.005);
                CHECK(std::abs(ratio - 1.0) < std::abs(ratio_prev - 1.0));
            }
        }
        // rotational stream: the same ratio still converges to 1 linearly
        std::vector<double> dev;
        for (double eps : {1e-3, 1e-4}) {
            ReducedState st = ReducedState::zeros(1);
            st.alpha[0] = eps;
            const auto h = m.hamiltonian(st);
            dev.push_back(std::abs((h.value - m.S0()) / (0.5 * mu1 * eps * eps) - 1.0));
        }
        CHECK(dev[1] < 0.15 * dev[0]);
    }
    SECTION("even in beta to bitwise precision") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 20; ++trial) {
            const ReducedState st = random_state(1, 1e-3, rng);
            ReducedState fl = st;
            fl.beta[0] = -fl.beta[0];
            CHECK(m.hamiltonian(st).value == m.hamiltonian(fl).value);
        }
    }
    SECTION("finite-difference gradient of the quadratic part") {
        std::mt19937_64 rng(31);
        const ReducedState st = random_state(1, 1e-3, rng);
        const double delta = 1e-6;
        ReducedState p = st, q = st;
        p.alpha[0] += delta;
        q.alpha[0] -= delta;
        const double ga = (m.hamiltonian(p).quadratic - m.hamiltonian(q).quadratic) / (2 * delta);
        CHECK(ga == Catch::Approx(mu1 * st.alpha[0]).margin(1e-7));
        p = st;
        q = st;
        p.beta[0] += delta;
        q.beta[0] -= delta;
        const double gb = (m.hamiltonian(p).quadratic - m.hamiltonian(q).quadratic) / (2 * delta);
        CHECK(gb == Catch::Approx(-st.beta[0]).margin(1e-7));
    }
}

TEST_CASE("surface guards", "[reduction]") {
    const ReducedModel m = model_b1();
    ReducedState st = ReducedState::zeros(1);
    // zeta = -alpha phi(d)/k: drive it past -d/2
    st.alpha[0] = 0.6 * m.stream().d * m.stream().k / m.phi_at_surface(0);
    CHECK_THROWS_AS(m.nonlinear_densities(st), surface_error);
}

TEST_CASE("mode-count override is bounded by the certified count", "[reduction]") {
    const VorticityModel vort = VorticityModel::constant(1.0);
    const auto stream = build_stream(vort, 1.5, {+1, 0});
    const auto spec = solve_spectrum(stream, vort, 6); // N = 1 here
    CHECK_THROWS_AS(ReducedModel(stream, vort, spec, 2), error);
    const ReducedModel ok(stream, vort, spec, 1);
    CHECK(ok.n_modes() == 1);
}
