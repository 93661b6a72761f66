#ifndef CRESTLINE_DYNAMICS_HPP
#define CRESTLINE_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "crestline/errors.hpp"
#include "crestline/grid.hpp"
#include "crestline/reduction.hpp"
#include "crestline/rng.hpp"

namespace crestline {

/// A sampled solution curve (alpha(x), beta(x)) with diagnostics.
struct Trajectory {
    std::vector<double> x;
    std::vector<ReducedState> states;
    std::vector<double> hamiltonian_values;
    std::vector<double> zeta_values;

    std::size_t size() const { return x.size(); }
    int n_modes() const { return states.empty() ? 0 : static_cast<int>(states[0].alpha.size()); }
};

struct SymmetryReport {
    double min_beta_norm = 0.0; // min over x of |beta(x)|, scaled by trajectory amplitude
    std::optional<double> symmetric_point;
    double mirror_residual = 0.0; // only meaningful when symmetric_point is set
    double amplitude = 0.0;       // max over x of |(alpha, beta)(x)|
};

struct IntegrateOptions {
    double step = 0.0;         // 0: 1e-3 * (2 pi / omega_fastest)
    double trust_radius = 0.0; // 0: |initial| * linear aspect ratio of the modes
    bool record_hamiltonian = true;
};

struct ScanResult {
    std::vector<double> deltas;
    std::vector<double> fractions;
    int samples = 0;
    double radius = 0.0;
    double x_window = 0.0;
    double slope_estimate = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double norm2(const double* y, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += y[i] * y[i];
    return std::sqrt(s);
}

/// One classical RK4 step of a flat-state field.
template <class Field>
inline void rk4_step(Field&& f, std::vector<double>& y, double h, std::vector<double>& k1,
                     std::vector<double>& k2, std::vector<double>& k3, std::vector<double>& k4,
                     std::vector<double>& tmp) {
    const std::size_t n = y.size();
    f(y.data(), k1.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(tmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(tmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(tmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace detail

/// Fastest linear frequency of the model, sqrt(-mu_1).
inline double fastest_frequency(const ReducedModel& model) {
    double w = 0.0;
    for (double mu : model.mu())
        if (mu < 0.0) w = std::max(w, std::sqrt(-mu));
    return w;
}

/// Default integration step: 1e-3 of the fastest linear period.
inline double default_step(const ReducedModel& model) {
    const double w = fastest_frequency(model);
    if (w <= 0.0) throw error("default_step: no negative eigenvalue sets a time scale");
    return 1e-3 * (2.0 * std::numbers::pi / w);
}

/// Reachable-amplitude ratio of the linear dynamics: a mode with frequency
/// w turns |alpha| into |beta| scaled by w, so a ball of initial data grows
/// by max(w, 1/w) under the linear flow.  The trust region is scaled by
/// this so it guards genuine nonlinear escape rather than linear rotation.
inline double linear_aspect(const ReducedModel& model) {
    double a = 1.0;
    for (double mu : model.mu())
        if (mu < 0.0) {
            const double w = std::sqrt(-mu);
            a = std::max({a, w, 1.0 / w});
        }
    return a;
}

/// Generic fixed-step RK4 sweep over [0, x_max] on a flat state.  The field
/// is any callable f(const double* y, double* dy).  Every step is recorded.
/// Aborts with trust_region_error once |y| exceeds twice the trust radius.
template <class Field>
inline void rk4_sweep(Field&& f, std::vector<double> y, double x_max, double step,
                      double trust_radius, std::vector<double>& xs,
                      std::vector<std::vector<double>>& ys) {
    if (!(step > 0.0)) throw error("integrate: step must be positive");
    if (std::abs(x_max) / step > 5e8)
        throw error("integrate: step " + std::to_string(step) + " needs more than 5e8 steps");
    const int dim = static_cast<int>(y.size());
    const int n_steps = std::max(1, static_cast<int>(std::ceil(std::abs(x_max) / step - 1e-12)));
    const double h = x_max / n_steps;
    std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    xs.clear();
    ys.clear();
    xs.reserve(static_cast<std::size_t>(n_steps) + 1);
    ys.reserve(static_cast<std::size_t>(n_steps) + 1);
    const double trust_limit = 2.0 * trust_radius * (1.0 + 1e-9);
    xs.push_back(0.0);
    ys.push_back(y);
    for (int i = 1; i <= n_steps; ++i) {
        detail::rk4_step(f, y, h, k1, k2, k3, k4, tmp);
        const double amp = detail::norm2(y.data(), dim);
        if (!std::isfinite(amp))
            throw error("integrate: state became non-finite at x = " + std::to_string(i * h));
        if (amp > trust_limit)
            throw trust_region_error(
                "integrate: amplitude " + std::to_string(amp) + " left the trust region (2 x " +
                std::to_string(trust_radius) + ") at x = " + std::to_string(i * h) +
                "; truncation validity lost");
        xs.push_back(i * h);
        ys.push_back(y);
    }
}

/// Integrate the reduced system from `initial` over [0, x_max], recording
/// the Hamiltonian and the surface elevation offset at every sample.
inline Trajectory integrate(const ReducedModel& model, const ReducedState& initial, double x_max,
                            IntegrateOptions opts = {}) {
    const int n = model.n_modes();
    if (static_cast<int>(initial.alpha.size()) != n || static_cast<int>(initial.beta.size()) != n)
        throw error("integrate: initial state dimension mismatch");
    if (opts.step == 0.0) opts.step = default_step(model);

    std::vector<double> y0(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < n; ++j) {
        y0[static_cast<std::size_t>(j)] = initial.alpha[static_cast<std::size_t>(j)];
        y0[static_cast<std::size_t>(n + j)] = initial.beta[static_cast<std::size_t>(j)];
    }
    if (opts.trust_radius == 0.0)
        opts.trust_radius = detail::norm2(y0.data(), 2 * n) * linear_aspect(model);

    ReducedWorkspace ws;
    auto field = [&](const double* y, double* dy) { model.vector_field_flat(y, dy, ws); };

    std::vector<double> xs;
    std::vector<std::vector<double>> ys;
    rk4_sweep(field, y0, x_max, opts.step, opts.trust_radius, xs, ys);

    Trajectory traj;
    traj.x = std::move(xs);
    traj.states.reserve(ys.size());
    traj.hamiltonian_values.reserve(ys.size());
    traj.zeta_values.reserve(ys.size());
    for (const auto& y : ys) {
        ReducedState st;
        st.alpha.assign(y.begin(), y.begin() + n);
        st.beta.assign(y.begin() + n, y.end());
        traj.zeta_values.push_back(model.zeta_of(st));
        traj.hamiltonian_values.push_back(opts.record_hamiltonian ? model.hamiltonian(st).value
                                                                  : 0.0);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

/// Numerical witness of reversibility: the forward run from (alpha, -beta)
/// must retrace the backward run from (alpha, beta) with beta flipped.
/// Returns the max-norm discrepancy over all samples.
inline double reverse_check(const ReducedModel& model, const ReducedState& initial, double x_max,
                            double step = 0.0) {
    const int n = model.n_modes();
    if (step == 0.0) step = default_step(model);
    std::vector<double> y_fwd(static_cast<std::size_t>(2 * n)), y_bwd(y_fwd);
    for (int j = 0; j < n; ++j) {
        y_fwd[static_cast<std::size_t>(j)] = initial.alpha[static_cast<std::size_t>(j)];
        y_fwd[static_cast<std::size_t>(n + j)] = -initial.beta[static_cast<std::size_t>(j)];
        y_bwd[static_cast<std::size_t>(j)] = initial.alpha[static_cast<std::size_t>(j)];
        y_bwd[static_cast<std::size_t>(n + j)] = initial.beta[static_cast<std::size_t>(j)];
    }
    const double trust = std::max(detail::norm2(y_fwd.data(), 2 * n), 1e-300) *
                         linear_aspect(model) * 4.0;

    ReducedWorkspace ws1, ws2;
    auto field1 = [&](const double* y, double* dy) { model.vector_field_flat(y, dy, ws1); };
    auto field2 = [&](const double* y, double* dy) { model.vector_field_flat(y, dy, ws2); };

    std::vector<double> xs_f, xs_b;
    std::vector<std::vector<double>> ys_f, ys_b;
    rk4_sweep(field1, y_fwd, x_max, step, trust, xs_f, ys_f);
    rk4_sweep(field2, y_bwd, -x_max, step, trust, xs_b, ys_b); // x decreasing

    double worst = 0.0;
    for (std::size_t i = 0; i < ys_f.size() && i < ys_b.size(); ++i) {
        for (int j = 0; j < n; ++j) {
            worst = std::max(worst, std::abs(ys_f[i][static_cast<std::size_t>(j)] -
                                             ys_b[i][static_cast<std::size_t>(j)]));
            worst = std::max(worst, std::abs(ys_f[i][static_cast<std::size_t>(n + j)] +
                                             ys_b[i][static_cast<std::size_t>(n + j)]));
        }
    }
    return worst;
}

/// Locate the best candidate symmetry point: refine the minima of |beta(x)|
/// and, if the smallest lies below tolerance * amplitude, verify the mirror
/// property alpha(x0+t) = alpha(x0-t), beta(x0+t) = -beta(x0-t) on the
/// overlap window.
inline SymmetryReport symmetry_scan(const Trajectory& traj, double tolerance) {
    if (traj.size() < 4) throw error("symmetry_scan: trajectory too short");
    const int n = traj.n_modes();
    const std::size_t m = traj.size();
    const double x0 = traj.x.front();
    const double h = traj.x[1] - traj.x[0];

    // per-component series for interpolation
    std::vector<std::vector<double>> ac(static_cast<std::size_t>(n)),
        bc(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        ac[static_cast<std::size_t>(j)].resize(m);
        bc[static_cast<std::size_t>(j)].resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            ac[static_cast<std::size_t>(j)][i] = traj.states[i].alpha[static_cast<std::size_t>(j)];
            bc[static_cast<std::size_t>(j)][i] = traj.states[i].beta[static_cast<std::size_t>(j)];
        }
    }
    auto beta_norm_at = [&](double x) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = interp_uniform(bc[static_cast<std::size_t>(j)], x0, h, x);
            s += v * v;
        }
        return std::sqrt(s);
    };

    SymmetryReport rep;
    std::vector<double> bn(m);
    for (std::size_t i = 0; i < m; ++i) {
        double a2 = 0.0, b2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double aj = ac[static_cast<std::size_t>(j)][i];
            const double bj = bc[static_cast<std::size_t>(j)][i];
            a2 += aj * aj + bj * bj;
            b2 += bj * bj;
        }
        rep.amplitude = std::max(rep.amplitude, std::sqrt(a2));
        bn[i] = std::sqrt(b2);
    }

    double best = bn[0];
    double best_x = traj.x[0];
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (bn[i] <= bn[i - 1] && bn[i] <= bn[i + 1]) {
            // golden-section refinement on the interpolated |beta|
            double lo = traj.x[i - 1], hi = traj.x[i + 1];
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = hi - gr * (hi - lo), dpt = lo + gr * (hi - lo);
            double fc = beta_norm_at(c), fd = beta_norm_at(dpt);
            for (int it = 0; it < 60; ++it) {
                if (fc < fd) {
                    hi = dpt;
                    dpt = c;
                    fd = fc;
                    c = hi - gr * (hi - lo);
                    fc = beta_norm_at(c);
                } else {
                    lo = c;
                    c = dpt;
                    fc = fd;
                    dpt = lo + gr * (hi - lo);
                    fd = beta_norm_at(dpt);
                }
            }
            const double xm = 0.5 * (lo + hi);
            const double fm = beta_norm_at(xm);
            if (fm < best) {
                best = fm;
                best_x = xm;
            }
        }
    }
    if (bn[m - 1] < best) {
        best = bn[m - 1];
        best_x = traj.x[m - 1];
    }

    const double scale = rep.amplitude > 0.0 ? rep.amplitude : 1.0;
    rep.min_beta_norm = best / scale;
    if (rep.min_beta_norm < tolerance) {
        rep.symmetric_point = best_x;
        const double half = std::min(best_x - traj.x.front(), traj.x.back() - best_x);
        const int n_t = static_cast<int>(std::floor(half / h));
        double resid = 0.0;
        for (int mstep = 1; mstep <= n_t; ++mstep) {
            const double t = mstep * h;
            for (int j = 0; j < n; ++j) {
                const auto& a = ac[static_cast<std::size_t>(j)];
                const auto& b = bc[static_cast<std::size_t>(j)];
                const double ap = interp_uniform(a, x0, h, best_x + t);
                const double am = interp_uniform(a, x0, h, best_x - t);
                const double bp = interp_uniform(b, x0, h, best_x + t);
                const double bm = interp_uniform(b, x0, h, best_x - t);
                resid = std::max(resid, std::abs(ap - am) + std::abs(bp + bm));
            }
        }
        rep.mirror_residual = resid;
    }
    return rep;
}

/// Monte-Carlo scan for the symmetric-set dimension: draw initial states
/// uniformly from the radius-ball in R^{2N}, integrate over the window, and
/// for each delta report the fraction of trajectories whose minimum of
/// |beta(x)|/radius falls below delta.  Per-sample counter substreams make
/// the result identical for any worker count.
inline ScanResult monte_carlo_symmetric_fraction(const ReducedModel& model, int samples,
                                                 double radius, std::vector<double> deltas,
                                                 double x_window, std::uint64_t seed,
                                                 double step = 0.0, int threads = 0) {
    const int n = model.n_modes();
    if (n < 2) throw error("monte_carlo_symmetric_fraction: requires N >= 2");
    if (!model.strict_negative())
        throw error("monte_carlo_symmetric_fraction: requires all counted eigenvalues strictly "
                    "negative");
    if (samples < 1) throw error("monte_carlo_symmetric_fraction: samples must be >= 1");
    if (step == 0.0) step = default_step(model);
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, samples);

    const int n_steps = std::max(1, static_cast<int>(std::ceil(x_window / step - 1e-12)));
    const double h = x_window / n_steps;
    const double trust_limit = 2.0 * radius * linear_aspect(model) * (1.0 + 1e-9);

    std::vector<double> min_ratio(static_cast<std::size_t>(samples), 0.0);
    std::vector<std::string> failures(static_cast<std::size_t>(threads));

    auto worker = [&](int tid, int lo, int hi) {
        try {
            ReducedWorkspace ws;
            auto field = [&](const double* y, double* dy) { model.vector_field_flat(y, dy, ws); };
            std::vector<double> y, k1, k2, k3, k4, tmp;
            const std::size_t dim = static_cast<std::size_t>(2 * n);
            k1.resize(dim);
            k2.resize(dim);
            k3.resize(dim);
            k4.resize(dim);
            tmp.resize(dim);
            for (int s = lo; s < hi; ++s) {
                y = sample_ball(seed, static_cast<std::uint64_t>(s), 2 * n, radius);
                double mn = detail::norm2(y.data() + n, n) / radius;
                for (int i = 0; i < n_steps; ++i) {
                    detail::rk4_step(field, y, h, k1, k2, k3, k4, tmp);
                    const double amp = detail::norm2(y.data(), 2 * n);
                    if (!std::isfinite(amp) || amp > trust_limit)
                        throw trust_region_error(
                            "scan sample " + std::to_string(s) +
                            " left the trust region; truncation validity lost");
                    mn = std::min(mn, detail::norm2(y.data() + n, n) / radius);
                }
                min_ratio[static_cast<std::size_t>(s)] = mn;
            }
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(tid)] = e.what();
        }
    };

    std::vector<std::thread> pool;
    const int chunk = (samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(samples, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, t, lo, hi);
    }
    for (auto& th : pool) th.join();
    for (const auto& f : failures)
        if (!f.empty()) throw error("monte_carlo_symmetric_fraction: " + f);

    ScanResult res;
    res.deltas = std::move(deltas);
    res.samples = samples;
    res.radius = radius;
    res.x_window = x_window;
    res.seed = seed;
    res.fractions.resize(res.deltas.size());
    for (std::size_t i = 0; i < res.deltas.size(); ++i) {
        int count = 0;
        for (double mr : min_ratio)
            if (mr < res.deltas[i]) ++count;
        res.fractions[i] = static_cast<double>(count) / samples;
    }

    // least-squares slope of log fraction vs log delta over nonzero bins
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int np = 0;
    for (std::size_t i = 0; i < res.deltas.size(); ++i) {
        if (res.fractions[i] <= 0.0) continue;
        const double lx = std::log(res.deltas[i]);
        const double ly = std::log(res.fractions[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++np;
    }
    res.slope_estimate =
        np >= 2 ? (np * sxy - sx * sy) / (np * sxx - sx * sx) : std::nan("");
    return res;
}

} // namespace crestline

#endif
