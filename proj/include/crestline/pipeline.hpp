#ifndef CRESTLINE_PIPELINE_HPP
#define CRESTLINE_PIPELINE_HPP

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crestline/config.hpp"
#include "crestline/dispersion.hpp"
#include "crestline/dynamics.hpp"
#include "crestline/errors.hpp"
#include "crestline/io.hpp"
#include "crestline/reconstruction.hpp"
#include "crestline/reduction.hpp"
#include "crestline/stream.hpp"
#include "crestline/version.hpp"
#include "crestline/vorticity.hpp"

namespace crestline {

/// Orchestrates the stage chain stream -> dispersion -> reduce -> simulate
/// -> scan-symmetry -> reconstruct from one declarative config.  Stages are
/// built lazily and deterministically, so a later stage always reproduces
/// its prerequisites.
class Pipeline {
  public:
    explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    const RunConfig& config() const { return cfg_; }

    const VorticityModel& vorticity() {
        if (!vort_)
            vort_ = VorticityModel::make(cfg_.vorticity.kind, cfg_.vorticity.coefficients);
        return *vort_;
    }

    const StreamSolution& stream() {
        if (!stream_) {
            Branch b{cfg_.stream.branch_sign, cfg_.stream.branch_j};
            stream_ = build_stream(vorticity(), cfg_.stream.s, b,
                                   cfg_.discretization.grid_points);
        }
        return *stream_;
    }

    const DispersionSpectrum& spectrum() {
        if (!spectrum_) spectrum_ = solve_spectrum(stream(), vorticity(), cfg_.modes.n_eigen);
        return *spectrum_;
    }

    const ReducedModel& model() {
        if (!model_)
            model_ = ReducedModel(stream(), vorticity(), spectrum(), cfg_.modes.n_modes,
                                  cfg_.discretization.quadrature_panels,
                                  cfg_.discretization.quadrature_order);
        return *model_;
    }

    ReducedState initial_state() {
        const ReducedModel& m = model();
        const int n = m.n_modes();
        if (!cfg_.simulate.present)
            throw config_error("simulate: section is required for this stage");
        ReducedState st = ReducedState::zeros(n);
        const auto& a = cfg_.simulate.initial_alpha;
        const auto& b = cfg_.simulate.initial_beta;
        if (static_cast<int>(a.size()) > n)
            throw config_error("simulate.initial_alpha: longer than the mode count " +
                               std::to_string(n));
        for (std::size_t j = 0; j < a.size(); ++j) {
            st.alpha[j] = a[j];
            st.beta[j] = b[j];
        }
        return st;
    }

    const Trajectory& trajectory() {
        if (!traj_) {
            IntegrateOptions opts;
            opts.step = cfg_.simulate.step;
            opts.trust_radius = cfg_.simulate.trust_radius;
            traj_ = integrate(model(), initial_state(), cfg_.simulate.x_max, opts);
        }
        return *traj_;
    }

    /// Run one subcommand, writing its artifacts (and a manifest) into
    /// `outdir`.  Returns the manifest.
    ordered_json run(const std::string& subcommand, const std::filesystem::path& outdir) {
        namespace fs = std::filesystem;
        fs::create_directories(outdir);
        if (subcommand == "stream")
            run_stream(outdir);
        else if (subcommand == "dispersion")
            run_dispersion(outdir);
        else if (subcommand == "reduce")
            run_reduce(outdir);
        else if (subcommand == "simulate")
            run_simulate(outdir);
        else if (subcommand == "scan-symmetry")
            run_scan(outdir);
        else if (subcommand == "reconstruct")
            run_reconstruct(outdir);
        else if (subcommand == "all") {
            run_stream(outdir);
            run_dispersion(outdir);
            if (count_nonpositive(spectrum()).n == 0) {
                // nothing to reduce onto; the spectrum is the final product
                summary_["reduction_skipped"] = "no non-positive eigenvalues";
            } else {
                run_reduce(outdir);
                if (cfg_.simulate.present) run_simulate(outdir);
                if (cfg_.scan.present && model().n_modes() >= 2) run_scan(outdir);
                if (cfg_.simulate.present) run_reconstruct(outdir);
            }
        } else {
            throw config_error("unknown subcommand \"" + subcommand + "\"");
        }
        const ordered_json manifest = make_manifest(subcommand);
        write_text(outdir / "manifest.json", manifest.dump(2) + "\n");
        return manifest;
    }

  private:
    bool want_csv() const {
        return std::find(cfg_.output.formats.begin(), cfg_.output.formats.end(), "csv") !=
               cfg_.output.formats.end();
    }
    bool want_json() const {
        return std::find(cfg_.output.formats.begin(), cfg_.output.formats.end(), "json") !=
               cfg_.output.formats.end();
    }

    void run_stream(const std::filesystem::path& dir) {
        const StreamSolution& s = stream();
        const TurningData t = turning_points(vorticity(), cfg_.stream.s);
        const auto family = depth_family(vorticity(), cfg_.stream.s,
                                         std::max(cfg_.stream.branch_j + 1, 3));
        if (want_csv()) {
            CsvWriter csv(dir / "stream.csv", {"Y", "u", "u_prime", "u_second"});
            for (std::size_t i = 0; i < s.u.size(); ++i)
                csv.row({s.u.node(i), s.u.values[i], s.u_z.values[i], s.u_zz.values[i]});
        }
        if (want_json()) {
            ordered_json j;
            j["s"] = s.s;
            j["branch"] = {{"sign", s.branch.sign > 0 ? "+" : "-"}, {"j", s.branch.j}};
            j["d"] = s.d;
            j["k"] = s.k;
            j["kappa"] = s.kappa;
            j["r"] = s.r;
            j["s0"] = t.s0;
            j["tau_plus"] = t.tau_plus;
            j["tau_minus"] = t.tau_minus;
            j["y_plus"] = t.y_plus;
            j["y_minus"] = t.y_minus;
            j["singular_plus"] = t.singular_plus;
            j["singular_minus"] = t.singular_minus;
            j["family"] = ordered_json::array();
            for (const auto& e : family)
                j["family"].push_back({{"sign", e.sign > 0 ? "+" : "-"},
                                       {"j", e.j},
                                       {"depth", e.depth},
                                       {"bernoulli", e.bernoulli},
                                       {"finite", e.finite}});
            write_text(dir / "stream.json", j.dump(2) + "\n");
        }
        summary_["d"] = s.d;
        summary_["k"] = s.k;
        summary_["kappa"] = s.kappa;
        summary_["r"] = s.r;
    }

    void run_dispersion(const std::filesystem::path& dir) {
        const DispersionSpectrum& sp = spectrum();
        const NonpositiveCount c = count_nonpositive(sp);
        if (want_csv()) {
            CsvWriter csv(dir / "spectrum.csv", {"j", "mu_j"});
            for (std::size_t j = 0; j < sp.mu.size(); ++j)
                csv.row({static_cast<double>(j + 1), sp.mu[j]});
            std::vector<std::string> cols{"z"};
            for (std::size_t j = 0; j < sp.mu.size(); ++j)
                cols.push_back("phi_" + std::to_string(j + 1));
            CsvWriter modes(dir / "modes.csv", cols);
            for (std::size_t i = 0; i < sp.phi[0].size(); ++i) {
                std::vector<double> row{sp.phi[0].node(i)};
                for (std::size_t j = 0; j < sp.mu.size(); ++j) row.push_back(sp.phi[j].values[i]);
                modes.row(row);
            }
        }
        if (want_json()) {
            ordered_json j;
            j["N"] = c.n;
            j["strict"] = c.strict;
            j["kappa"] = sp.robin;
            j["d"] = sp.depth;
            j["n_eigen"] = static_cast<int>(sp.mu.size());
            write_text(dir / "dispersion.json", j.dump(2) + "\n");
        }
        summary_["N"] = c.n;
        summary_["strict"] = c.strict;
    }

    void run_reduce(const std::filesystem::path& dir) {
        const ReducedModel& m = model();
        if (want_json()) {
            ordered_json j;
            j["n_modes"] = m.n_modes();
            j["mu"] = m.mu();
            j["S0"] = m.S0();
            j["strict"] = m.strict_negative();
            j["quadrature_panels"] = cfg_.discretization.quadrature_panels;
            j["quadrature_order"] = cfg_.discretization.quadrature_order;
            write_text(dir / "reduced.json", j.dump(2) + "\n");
        }
        summary_["n_modes"] = m.n_modes();
        summary_["S0"] = m.S0();
    }

    void run_simulate(const std::filesystem::path& dir) {
        const Trajectory& tr = trajectory();
        const int n = tr.n_modes();
        if (want_csv()) {
            std::vector<std::string> cols{"x"};
            for (int j = 1; j <= n; ++j) cols.push_back("alpha_" + std::to_string(j));
            for (int j = 1; j <= n; ++j) cols.push_back("beta_" + std::to_string(j));
            cols.push_back("s");
            cols.push_back("zeta");
            CsvWriter csv(dir / "trajectory.csv", cols);
            std::vector<double> row;
            for (std::size_t i = 0; i < tr.size(); ++i) {
                row.clear();
                row.push_back(tr.x[i]);
                for (int j = 0; j < n; ++j)
                    row.push_back(tr.states[i].alpha[static_cast<std::size_t>(j)]);
                for (int j = 0; j < n; ++j)
                    row.push_back(tr.states[i].beta[static_cast<std::size_t>(j)]);
                row.push_back(tr.hamiltonian_values[i]);
                row.push_back(tr.zeta_values[i]);
                csv.row(row);
            }
        }
        const SymmetryReport rep = symmetry_scan(tr, 1e-6);
        summary_["hamiltonian_drift"] =
            *std::max_element(tr.hamiltonian_values.begin(), tr.hamiltonian_values.end()) -
            *std::min_element(tr.hamiltonian_values.begin(), tr.hamiltonian_values.end());
        summary_["min_beta_norm"] = rep.min_beta_norm;
    }

    void run_scan(const std::filesystem::path& dir) {
        if (!cfg_.scan.present) throw config_error("scan: section is required for this stage");
        const ScanResult res = monte_carlo_symmetric_fraction(
            model(), cfg_.scan.samples, cfg_.scan.radius, cfg_.scan.deltas, cfg_.scan.x_window,
            cfg_.scan.seed, cfg_.scan.step, cfg_.scan.threads);
        if (want_csv()) {
            CsvWriter csv(dir / "symmetry.csv", {"delta", "fraction", "samples"});
            for (std::size_t i = 0; i < res.deltas.size(); ++i)
                csv.row({res.deltas[i], res.fractions[i], static_cast<double>(res.samples)});
        }
        if (want_json()) {
            ordered_json j;
            j["slope_estimate"] = res.slope_estimate;
            j["seed"] = res.seed;
            j["samples"] = res.samples;
            j["radius"] = res.radius;
            j["x_window"] = res.x_window;
            write_text(dir / "symmetry.json", j.dump(2) + "\n");
        }
        summary_["scan_slope"] = res.slope_estimate;
    }

    void run_reconstruct(const std::filesystem::path& dir) {
        const WaveFields w = reconstruct(model(), trajectory(), cfg_.reconstruct.n_z);
        const double bern = bernoulli_residual(w, model());
        const double interior = field_residual(w, model());
        if (want_csv()) {
            CsvWriter profile(dir / "profile.csv", {"x", "eta"});
            for (std::size_t i = 0; i < w.nx(); ++i) profile.row({w.x[i], w.eta[i]});
            int stride = cfg_.reconstruct.fields_x_stride;
            if (stride <= 0)
                stride = std::max<int>(1, static_cast<int>(w.nx()) / 128);
            CsvWriter fields(dir / "fields.csv", {"x", "z", "Phi", "Psi"});
            for (std::size_t i = 0; i < w.nx(); i += static_cast<std::size_t>(stride))
                for (std::size_t m = 0; m < w.nz(); ++m)
                    fields.row({w.x[i], w.z[m], w.at(w.Phi, i, m), w.at(w.Psi, i, m)});
        }
        // truncation-order probe: residuals on an amplitude sweep of the
        // configured initial state
        std::vector<double> amps, bres, ires;
        const ReducedState base = initial_state();
        double base_norm = 0.0;
        for (double v : base.alpha) base_norm += v * v;
        for (double v : base.beta) base_norm += v * v;
        base_norm = std::sqrt(base_norm);
        if (base_norm > 0.0 && cfg_.reconstruct.amplitude_sweep.size() >= 2) {
            for (double scale : cfg_.reconstruct.amplitude_sweep) {
                ReducedState st = base;
                for (auto& v : st.alpha) v *= scale;
                for (auto& v : st.beta) v *= scale;
                IntegrateOptions opts;
                opts.step = cfg_.simulate.step;
                opts.record_hamiltonian = false;
                const double window = std::min(cfg_.simulate.x_max, 20.0);
                const Trajectory t = integrate(model(), st, window, opts);
                const WaveFields wf = reconstruct(model(), t, cfg_.reconstruct.n_z);
                amps.push_back(scale * base_norm);
                bres.push_back(bernoulli_residual(wf, model()));
                ires.push_back(field_residual(wf, model()));
            }
        }
        auto fit_slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int np = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (!(ys[i] > 0.0)) continue;
                const double lx = std::log(xs[i]), ly = std::log(ys[i]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++np;
            }
            return np >= 2 ? (np * sxy - sx * sy) / (np * sxx - sx * sx) : std::nan("");
        };
        if (want_json()) {
            ordered_json j;
            j["bernoulli"] = bern;
            j["interior"] = interior;
            j["slopes"] = {{"amplitudes", amps},
                           {"bernoulli_residuals", bres},
                           {"interior_residuals", ires},
                           {"bernoulli_slope", fit_slope(amps, bres)},
                           {"interior_slope", fit_slope(amps, ires)}};
            write_text(dir / "residuals.json", j.dump(2) + "\n");
        }
        summary_["bernoulli_residual"] = bern;
        summary_["interior_residual"] = interior;
    }

    ordered_json make_manifest(const std::string& command) const {
        ordered_json m;
        m["library"] = "crestline";
        m["version"] = version;
        m["command"] = command;
        m["config"] = cfg_.to_json();
        m["summary"] = summary_;
        return m;
    }

    RunConfig cfg_;
    std::optional<VorticityModel> vort_;
    std::optional<StreamSolution> stream_;
    std::optional<DispersionSpectrum> spectrum_;
    std::optional<ReducedModel> model_;
    std::optional<Trajectory> traj_;
    ordered_json summary_ = ordered_json::object();
};

} // namespace crestline

#endif
