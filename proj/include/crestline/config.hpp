#ifndef CRESTLINE_CONFIG_HPP
#define CRESTLINE_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crestline/errors.hpp"
#include "crestline/vorticity.hpp"

namespace crestline {

using ordered_json = nlohmann::ordered_json;

/// Declarative run configuration for the CLI pipeline.  Sections beyond
/// vorticity/stream are optional; stages that need a missing section fail
/// with a config error naming it.
struct RunConfig {
    struct Vorticity {
        VorticityKind kind = VorticityKind::zero;
        std::vector<double> coefficients;
    } vorticity;

    struct Stream {
        double s = 1.0;
        int branch_sign = +1;
        int branch_j = 0;
    } stream;

    struct Discretization {
        int grid_points = 2048;
        int quadrature_order = 8;
        int quadrature_panels = 64;
    } discretization;

    struct Modes {
        int n_eigen = 8;
        int n_modes = 0; // 0 = "auto": count of non-positive eigenvalues
    } modes;

    struct Simulate {
        bool present = false;
        double x_max = 100.0;
        double step = 0.0; // 0 = default from the fastest mode
        std::vector<double> initial_alpha;
        std::vector<double> initial_beta;
        double trust_radius = 0.0; // 0 = |initial| * linear aspect
    } simulate;

    struct Scan {
        bool present = false;
        int samples = 2000;
        double radius = 1e-3;
        std::vector<double> deltas{0.08, 0.04, 0.02};
        double x_window = 40.0;
        std::uint64_t seed = 1;
        double step = 0.0;
        int threads = 0; // 0 = hardware concurrency
    } scan;

    struct Reconstruct {
        int n_z = 129;
        int fields_x_stride = 0; // 0 = auto (~128 columns)
        std::vector<double> amplitude_sweep{1.0, 2.0, 4.0, 8.0};
    } reconstruct;

    struct Output {
        std::string directory = "out";
        std::vector<std::string> formats{"csv", "json"};
    } output;

    void validate() const;
    ordered_json to_json() const;
    static RunConfig from_json(const ordered_json& j);
    static RunConfig load(const std::filesystem::path& path);
};

namespace detail {

inline void require_finite(double v, const std::string& path) {
    if (!std::isfinite(v)) throw config_error(path + ": must be finite");
}

template <class T>
T get_or(const ordered_json& j, const char* key, T fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(path + "." + key + ": wrong type");
    }
}

} // namespace detail

inline void RunConfig::validate() const {
    for (double c : vorticity.coefficients) detail::require_finite(c, "vorticity.coefficients");
    detail::require_finite(stream.s, "stream.s");
    if (!(stream.s > 0.0)) throw config_error("stream.s: must be > 0");
    if (stream.branch_sign != 1 && stream.branch_sign != -1)
        throw config_error("stream.branch_sign: must be \"+\" or \"-\"");
    if (stream.branch_j < 0) throw config_error("stream.branch_j: must be >= 0");
    if (stream.branch_sign == -1 && stream.branch_j < 1)
        throw config_error("stream.branch_j: the minus family starts at j = 1");
    if (discretization.grid_points < 64)
        throw config_error("discretization.grid_points: must be >= 64");
    if (discretization.quadrature_order < 2 || discretization.quadrature_order > 32)
        throw config_error("discretization.quadrature_order: must be in [2, 32]");
    if (discretization.quadrature_panels < 4)
        throw config_error("discretization.quadrature_panels: must be >= 4");
    if (modes.n_eigen < 1) throw config_error("modes.n_eigen: must be >= 1");
    if (modes.n_modes < 0) throw config_error("modes.n_modes: must be \"auto\" or >= 1");
    if (modes.n_modes > modes.n_eigen)
        throw config_error("modes.n_modes: must be <= modes.n_eigen");
    if (simulate.present) {
        detail::require_finite(simulate.x_max, "simulate.x_max");
        if (!(simulate.x_max > 0.0)) throw config_error("simulate.x_max: must be > 0");
        detail::require_finite(simulate.step, "simulate.step");
        if (simulate.step < 0.0) throw config_error("simulate.step: must be >= 0 (0 = auto)");
        if (simulate.initial_alpha.size() != simulate.initial_beta.size())
            throw config_error("simulate.initial_beta: must match initial_alpha in length");
        for (double v : simulate.initial_alpha)
            detail::require_finite(v, "simulate.initial_alpha");
        for (double v : simulate.initial_beta) detail::require_finite(v, "simulate.initial_beta");
        detail::require_finite(simulate.trust_radius, "simulate.trust_radius");
        if (simulate.trust_radius < 0.0)
            throw config_error("simulate.trust_radius: must be >= 0 (0 = auto)");
    }
    if (scan.present) {
        if (scan.samples < 1) throw config_error("scan.samples: must be >= 1");
        detail::require_finite(scan.radius, "scan.radius");
        if (!(scan.radius > 0.0)) throw config_error("scan.radius: must be > 0");
        if (scan.deltas.empty()) throw config_error("scan.deltas: must be nonempty");
        for (std::size_t i = 0; i < scan.deltas.size(); ++i) {
            detail::require_finite(scan.deltas[i], "scan.deltas");
            if (!(scan.deltas[i] > 0.0)) throw config_error("scan.deltas: must be > 0");
            if (i > 0 && !(scan.deltas[i] < scan.deltas[i - 1]))
                throw config_error("scan.deltas: must be strictly decreasing");
        }
        detail::require_finite(scan.x_window, "scan.x_window");
        if (!(scan.x_window > 0.0)) throw config_error("scan.x_window: must be > 0");
        detail::require_finite(scan.step, "scan.step");
        if (scan.step < 0.0) throw config_error("scan.step: must be >= 0 (0 = auto)");
        if (scan.threads < 0) throw config_error("scan.threads: must be >= 0");
    }
    if (reconstruct.n_z < 17) throw config_error("reconstruct.n_z: must be >= 17");
    if (reconstruct.fields_x_stride < 0)
        throw config_error("reconstruct.fields_x_stride: must be >= 0");
    if (reconstruct.amplitude_sweep.empty())
        throw config_error("reconstruct.amplitude_sweep: must be nonempty");
    for (double a : reconstruct.amplitude_sweep) {
        detail::require_finite(a, "reconstruct.amplitude_sweep");
        if (!(a > 0.0)) throw config_error("reconstruct.amplitude_sweep: must be > 0");
    }
    if (output.directory.empty()) throw config_error("output.directory: must be nonempty");
    for (const auto& f : output.formats)
        if (f != "csv" && f != "json")
            throw config_error("output.formats: unknown format \"" + f + "\"");
}

inline RunConfig RunConfig::from_json(const ordered_json& root) {
    // a manifest embeds the resolved config under "config"
    const ordered_json& j =
        (root.contains("config") && root.at("config").is_object()) ? root.at("config") : root;

    RunConfig c;
    if (!j.contains("vorticity")) throw config_error("vorticity: section is required");
    {
        const auto& v = j.at("vorticity");
        const std::string kind = detail::get_or<std::string>(v, "kind", "zero", "vorticity");
        if (kind == "zero")
            c.vorticity.kind = VorticityKind::zero;
        else if (kind == "constant")
            c.vorticity.kind = VorticityKind::constant;
        else if (kind == "linear")
            c.vorticity.kind = VorticityKind::linear;
        else if (kind == "polynomial")
            c.vorticity.kind = VorticityKind::polynomial;
        else
            throw config_error("vorticity.kind: unknown kind \"" + kind + "\"");
        c.vorticity.coefficients =
            detail::get_or<std::vector<double>>(v, "coefficients", {}, "vorticity");
    }
    if (!j.contains("stream")) throw config_error("stream: section is required");
    {
        const auto& s = j.at("stream");
        if (!s.contains("s")) throw config_error("stream.s: required");
        c.stream.s = detail::get_or<double>(s, "s", 0.0, "stream");
        const std::string sign = detail::get_or<std::string>(s, "branch_sign", "+", "stream");
        if (sign == "+")
            c.stream.branch_sign = 1;
        else if (sign == "-")
            c.stream.branch_sign = -1;
        else
            throw config_error("stream.branch_sign: must be \"+\" or \"-\"");
        c.stream.branch_j = detail::get_or<int>(s, "branch_j", 0, "stream");
    }
    if (j.contains("discretization")) {
        const auto& d = j.at("discretization");
        c.discretization.grid_points =
            detail::get_or<int>(d, "grid_points", c.discretization.grid_points, "discretization");
        c.discretization.quadrature_order = detail::get_or<int>(
            d, "quadrature_order", c.discretization.quadrature_order, "discretization");
        c.discretization.quadrature_panels = detail::get_or<int>(
            d, "quadrature_panels", c.discretization.quadrature_panels, "discretization");
    }
    if (j.contains("modes")) {
        const auto& m = j.at("modes");
        c.modes.n_eigen = detail::get_or<int>(m, "n_eigen", c.modes.n_eigen, "modes");
        if (m.contains("n_modes")) {
            if (m.at("n_modes").is_string()) {
                if (m.at("n_modes").get<std::string>() != "auto")
                    throw config_error("modes.n_modes: must be \"auto\" or an integer");
                c.modes.n_modes = 0;
            } else {
                c.modes.n_modes = detail::get_or<int>(m, "n_modes", 0, "modes");
            }
        }
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        c.simulate.present = true;
        c.simulate.x_max = detail::get_or<double>(s, "x_max", c.simulate.x_max, "simulate");
        c.simulate.step = detail::get_or<double>(s, "step", 0.0, "simulate");
        c.simulate.initial_alpha =
            detail::get_or<std::vector<double>>(s, "initial_alpha", {}, "simulate");
        c.simulate.initial_beta =
            detail::get_or<std::vector<double>>(s, "initial_beta", {}, "simulate");
        c.simulate.trust_radius = detail::get_or<double>(s, "trust_radius", 0.0, "simulate");
    }
    if (j.contains("scan")) {
        const auto& s = j.at("scan");
        c.scan.present = true;
        c.scan.samples = detail::get_or<int>(s, "samples", c.scan.samples, "scan");
        c.scan.radius = detail::get_or<double>(s, "radius", c.scan.radius, "scan");
        c.scan.deltas = detail::get_or<std::vector<double>>(s, "deltas", c.scan.deltas, "scan");
        c.scan.x_window = detail::get_or<double>(s, "x_window", c.scan.x_window, "scan");
        c.scan.seed = detail::get_or<std::uint64_t>(s, "seed", c.scan.seed, "scan");
        c.scan.step = detail::get_or<double>(s, "step", 0.0, "scan");
        c.scan.threads = detail::get_or<int>(s, "threads", 0, "scan");
    }
    if (j.contains("reconstruct")) {
        const auto& r = j.at("reconstruct");
        c.reconstruct.n_z = detail::get_or<int>(r, "n_z", c.reconstruct.n_z, "reconstruct");
        c.reconstruct.fields_x_stride =
            detail::get_or<int>(r, "fields_x_stride", 0, "reconstruct");
        c.reconstruct.amplitude_sweep = detail::get_or<std::vector<double>>(
            r, "amplitude_sweep", c.reconstruct.amplitude_sweep, "reconstruct");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        c.output.directory =
            detail::get_or<std::string>(o, "directory", c.output.directory, "output");
        c.output.formats =
            detail::get_or<std::vector<std::string>>(o, "formats", c.output.formats, "output");
    }
    c.validate();
    return c;
}

inline ordered_json RunConfig::to_json() const {
    ordered_json j;
    j["vorticity"] = {{"kind", to_string(vorticity.kind)},
                      {"coefficients", vorticity.coefficients}};
    j["stream"] = {{"s", stream.s},
                   {"branch_sign", stream.branch_sign > 0 ? "+" : "-"},
                   {"branch_j", stream.branch_j}};
    j["discretization"] = {{"grid_points", discretization.grid_points},
                           {"quadrature_order", discretization.quadrature_order},
                           {"quadrature_panels", discretization.quadrature_panels}};
    j["modes"] = {{"n_eigen", modes.n_eigen}};
    if (modes.n_modes == 0)
        j["modes"]["n_modes"] = "auto";
    else
        j["modes"]["n_modes"] = modes.n_modes;
    if (simulate.present) {
        j["simulate"] = {{"x_max", simulate.x_max},
                         {"step", simulate.step},
                         {"initial_alpha", simulate.initial_alpha},
                         {"initial_beta", simulate.initial_beta},
                         {"trust_radius", simulate.trust_radius}};
    }
    if (scan.present) {
        j["scan"] = {{"samples", scan.samples}, {"radius", scan.radius},
                     {"deltas", scan.deltas},   {"x_window", scan.x_window},
                     {"seed", scan.seed},       {"step", scan.step},
                     {"threads", scan.threads}};
    }
    j["reconstruct"] = {{"n_z", reconstruct.n_z},
                        {"fields_x_stride", reconstruct.fields_x_stride},
                        {"amplitude_sweep", reconstruct.amplitude_sweep}};
    j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
    return j;
}

inline RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

} // namespace crestline

#endif
