// Command-line front end: profile, scan, spectrum, evolve, gauge, shock, version.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rollwave/bloch.hpp"
#include "rollwave/conditions.hpp"
#include "rollwave/evolution.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/io.hpp"
#include "rollwave/profile.hpp"
#include "rollwave/scan.hpp"
#include "rollwave/shock.hpp"

namespace fs = std::filesystem;
using namespace rollwave;
using io::json;

namespace {

constexpr const char* kVersion = "1.0.0";

int exit_code_for(const std::string& category) {
    if (category == "domain") return 1;
    if (category == "io") return 3;
    return 2;
}

int report(const std::string& category, const std::string& message) {
    std::cerr << json{{"error", category}, {"message", message}}.dump() << std::endl;
    return exit_code_for(category);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

// ROLLWAVE_JOBS is the --jobs default for subcommands that take it; flags and
// config keys win over it.
std::vector<std::string> merge_env(std::vector<std::string> args) {
    const char* jobs = std::getenv("ROLLWAVE_JOBS");
    if (!jobs || !*jobs || args.empty() || has_flag(args, "--jobs") || args.front() == "version") return args;
    args.push_back("--jobs");
    args.push_back(jobs);
    return args;
}

// Appends "--key value" pairs from a JSON config for keys not already given on
// the command line, so flags win over the file.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const json cfg = io::read_json(path);
    if (!cfg.is_object()) throw DomainError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        const std::string flag = "--" + name;
        if (name == "config" || has_flag(args, flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                args.push_back(flag);
                args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
        } else if (value.is_string()) {
            args.push_back(flag);
            args.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            args.push_back(flag);
            args.push_back(value.is_number_float() ? io::num(value.get<double>()) : value.dump());
        } else {
            throw DomainError("config key '" + key + "' has an unsupported type");
        }
    }
    return args;
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

struct Common {
    std::string config;
    std::string out = ".";
    std::string format = "both";
    int jobs = 1;
    bool json_out() const { return format != "csv"; }
    bool csv_out() const { return format != "json"; }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON file whose keys mirror the long flag names");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--format", c.format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
    sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

WaveProfile load_profile(const std::string& path) { return io::profile_from_json(io::read_json(path)); }

// ---------------------------------------------------------------- profile
struct ProfileArgs {
    double froude = 2.05;
    double nu = 0.1;
    double period = 10.0;
    int n = 128;
    double continue_to = 0.0;
    double seed_amplitude = 0.01;
    double seed_froude = 2.05;
};

int cmd_profile(const ProfileArgs& a, const Common& c) {
    if (a.n < 8) throw DomainError("--n must be at least 8");
    if (!(a.period > 0.0)) throw DomainError("--period must be positive");
    ModelParams p;
    p.froude = a.froude;
    p.nu = a.nu;
    p.validate();
    SeedOptions so;
    so.initial_amplitude = a.seed_amplitude;
    // far from onset the small-amplitude family is followed from seed_froude instead
    p.froude = std::min(a.froude, a.seed_froude);
    WaveProfile w = seed_roll_wave(p, a.period, a.n, so);
    if (a.froude > p.froude) {
        const ContinuationRun run = continue_in_parameter(w, a.froude);
        if (run.failed) throw NumericalError("continuation from the seed stopped: " + run.failure_reason);
        w = run.profiles.back();
    }
    const fs::path out = prepare_out(c.out);
    if (c.json_out()) io::write_json((out / "profile.json").string(), io::to_json(w));
    if (c.csv_out()) io::write_text((out / "profile.csv").string(), io::profile_csv(w));
    json summary{{"froude", w.params.froude},          {"period", w.period},
                 {"speed", w.speed()},                 {"discharge", w.discharge()},
                 {"amplitude", w.amplitude()},         {"residual_norm", w.residual_norm},
                 {"slope", io::to_json(slope_report(w))}};
    summary["slope"].erase("alpha");
    if (a.continue_to > 0.0) {
        const ContinuationRun run = continue_in_parameter(w, a.continue_to);
        const fs::path dir = prepare_out((out / "continuation").string());
        std::string path_csv = "index,F,c,q,amplitude,pointwise_margin,averaged_value\n";
        for (std::size_t i = 0; i < run.profiles.size(); ++i) {
            const WaveProfile& pi = run.profiles[i];
            const SlopeReport sr = slope_report(pi);
            char name[32];
            std::snprintf(name, sizeof name, "profile_%03zu.json", i);
            io::write_json((dir / name).string(), io::to_json(pi));
            path_csv += std::to_string(i) + "," + io::num(pi.params.froude) + "," + io::num(pi.speed()) + "," +
                        io::num(pi.discharge()) + "," + io::num(pi.amplitude()) + "," +
                        io::num(sr.pointwise_margin) + "," + io::num(sr.averaged_value) + "\n";
        }
        io::write_text((dir / "path.csv").string(), path_csv);
        summary["continuation"] = {{"target", a.continue_to},
                                   {"reached", run.path.back()},
                                   {"steps", run.profiles.size()},
                                   {"failed", run.failed},
                                   {"failure_reason", run.failure_reason}};
        if (run.failed) {
            std::cout << summary.dump(2) << std::endl;
            throw NumericalError("continuation stopped: " + run.failure_reason);
        }
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

// ---------------------------------------------------------------- scan
struct ScanArgs {
    double froude_min = 2.1;
    double froude_max = 4.5;
    double froude_step = 0.1;
    std::vector<double> froude_list;
    std::vector<double> periods{10.0};
    double nu = 0.1;
    int n = 128;
    double seed_froude = 2.05;
    bool no_stability = false;
    bool no_eta = false;
    unsigned seed = 1;
};

int cmd_scan(const ScanArgs& a, const Common& c) {
    ScanConfig cfg;
    if (!a.froude_list.empty()) {
        cfg.froude = a.froude_list;
    } else {
        if (!(a.froude_step > 0.0)) throw DomainError("--froude-step must be positive");
        const int count = static_cast<int>(std::floor((a.froude_max - a.froude_min) / a.froude_step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) cfg.froude.push_back(a.froude_min + i * a.froude_step);
    }
    if (cfg.froude.empty() || a.periods.empty()) throw DomainError("scan grid is empty");
    cfg.periods = a.periods;
    cfg.nu = a.nu;
    cfg.n = a.n;
    cfg.seed_froude = a.seed_froude;
    cfg.stability = !a.no_stability;
    cfg.fit_eta = !a.no_eta;
    cfg.seed = a.seed;
    cfg.jobs = c.jobs;
    const ScanResult res = run_scan(cfg);
    const fs::path out = prepare_out(c.out);
    io::write_text((out / "scan.csv").string(), scan_csv(res));
    json summary = json::array();
    for (const BranchSummary& b : res.branches) {
        json s{{"Xi", b.period}, {"rows", b.rows}, {"failures", b.failures}, {"averaged_positive", b.averaged_positive}};
        s["F_star"] = b.froude_star ? json(*b.froude_star) : json(nullptr);
        summary.push_back(s);
    }
    io::write_json((out / "scan_summary.json").string(), json{{"branches", summary}});
    std::cout << json{{"branches", summary}}.dump(2) << std::endl;
    return 0;
}

// ---------------------------------------------------------------- spectrum
struct SpectrumArgs {
    std::string profile;
    int xi_points = 64;
    int modes = 64;
    int refine_levels = 6;
    double tail = 1e-4;
};

int cmd_spectrum(const SpectrumArgs& a, const Common& c) {
    const WaveProfile w = load_profile(a.profile);
    const LinearCoefficients lc = linearize(w);
    ClassifyOptions co;
    co.xi_points = a.xi_points;
    co.modes = a.modes;
    co.refine_levels = a.refine_levels;
    co.tail_threshold = a.tail;
    co.jobs = c.jobs;
    const StabilityReport rep = classify_stability(lc, co);
    const fs::path out = prepare_out(c.out);
    if (c.csv_out()) io::write_text((out / "spectrum.csv").string(), io::spectra_csv(rep.spectra));
    json j = io::to_json(rep);
    try {
        HfOptions ho;
        ho.tail_threshold = a.tail;
        const HfEstimate hf = hf_asymptote(lc, a.modes, ho);
        j["hf_asymptote"] = {{"estimate", hf.estimate}, {"target", hf.target}, {"relative_error", hf.relative_error}};
    } catch (const NumericalError& e) {
        j["hf_asymptote"] = {{"error", e.what()}};
    }
    if (c.json_out()) io::write_json((out / "stability.json").string(), j);
    std::cout << json{{"d1", rep.d1}, {"d2", rep.d2}, {"d3", rep.d3}, {"h", rep.h},
                      {"theta", rep.theta}, {"max_real_part", rep.max_real_part}}
                     .dump(2)
              << std::endl;
    return 0;
}

// ---------------------------------------------------------------- gauge
struct GaugeArgs {
    std::string profile;
    double phi2 = 0.0;
    std::string weight = "cubic";
};

int cmd_gauge(const GaugeArgs& a, const Common& c) {
    const WaveProfile w = load_profile(a.profile);
    GaugeOptions go;
    if (a.phi2 > 0.0) go.phi2 = a.phi2;
    go.weight = energy_weight_from_string(a.weight);
    const GaugeTriple g = build_gauge(w, go);
    const fs::path out = prepare_out(c.out);
    if (c.json_out()) io::write_json((out / "gauge.json").string(), io::to_json(g, w.grid()));
    if (c.csv_out()) io::write_text((out / "gauge.csv").string(), io::gauge_csv(g, w.grid()));
    std::cout << json{{"coercivity_min", g.coercivity_min}, {"phi2", g.phi2},        {"phi1_min", g.phi1_min},
                      {"phi1_max", g.phi1_max},             {"mean_rate", g.mean_rate}, {"periodicity_gap", g.periodicity_gap}}
                     .dump(2)
              << std::endl;
    return 0;
}

// ---------------------------------------------------------------- evolve
struct EvolveArgs {
    std::string profile;
    bool linear = false;
    bool nonlinear = false;
    bool modulated = false;
    double t = 10.0;
    double dt = 0.01;
    int sample_every = 5;
    int snapshot_every = 0;
    double amplitude = 1e-3;
    int max_mode = 4;
    unsigned seed = 1;
    std::string psi = "eps*sin(2*pi*x/Xi)*exp(-t)";
    double eps = 1e-3;
    double epsilon_bound = 0.0;
    int delta_every = 0;
    bool keep_neutral = false;
};

int cmd_evolve(const EvolveArgs& a, const Common& c) {
    if (int(a.linear) + int(a.nonlinear) + int(a.modulated) != 1)
        throw DomainError("choose exactly one of --linear, --nonlinear, --modulated");
    const WaveProfile w = load_profile(a.profile);
    const LinearCoefficients lc = linearize(w);
    const FieldPair v0 = random_smooth_perturbation(w.size(), w.period, a.max_mode, a.amplitude, a.seed);
    const fs::path out = prepare_out(c.out);
    json j{{"profile", a.profile}, {"n", w.size()}, {"T", a.t}, {"dt", a.dt}, {"scheme", "ARS(2,2,2) IMEX"},
           {"scheme_order", 2},    {"seed", a.seed}, {"amplitude", a.amplitude}};
    auto fill = [&](EvolveOptions& eo) {
        eo.T = a.t;
        eo.dt = a.dt;
        eo.sample_every = a.sample_every;
        eo.snapshot_every = a.snapshot_every;
    };
    if (a.linear) {
        EvolveOptions eo;
        fill(eo);
        const GaugeTriple g = build_gauge(lc);
        const LinearRun run = evolve_linear(lc, g, a.keep_neutral ? v0 : remove_neutral_modes(lc, v0), eo);
        j["neutral_modes_removed"] = !a.keep_neutral;
        j["mode"] = "linear";
        j["fit"] = io::trace_summary(run.trace);
        j["lemma"] = io::to_json(lemma_sample_check(run.trace));
        if (c.csv_out()) {
            io::write_text((out / "trace.csv").string(), io::trace_csv(run.trace));
            if (a.snapshot_every > 0)
                io::write_text((out / "trajectory.csv").string(), io::trajectory_csv(run.trajectory, w.grid()));
        }
    } else if (a.nonlinear) {
        NonlinearOptions eo;
        fill(eo);
        eo.delta_every = a.delta_every;
        const FieldPair full{w.tau_bar + v0.tau, w.u_bar + v0.u};
        const NonlinearRun run = evolve_nonlinear(lc, full, eo);
        j["mode"] = "nonlinear";
        j["final_L2"] = run.L2_values.back();
        j["final_H1"] = run.H1_values.back();
        j["delta_times"] = run.delta_times;
        j["delta_values"] = run.delta_values;
        if (c.csv_out()) {
            std::string csv = "t,L2,H1\n";
            for (std::size_t i = 0; i < run.times.size(); ++i)
                csv += io::num(run.times[i]) + "," + io::num(run.L2_values[i]) + "," + io::num(run.H1_values[i]) + "\n";
            io::write_text((out / "trace.csv").string(), csv);
            if (a.snapshot_every > 0)
                io::write_text((out / "trajectory.csv").string(), io::trajectory_csv(run.trajectory, w.grid()));
        }
    } else {
        ModulatedOptions eo;
        fill(eo);
        const GaugeTriple g = build_gauge(lc);
        const ModulationInput psi = modulation_from_formula(
            a.psi, {{"Xi", w.period}, {"L", w.period}, {"eps", a.eps}}, a.epsilon_bound, 2);
        const ModulatedRun run = evolve_modulated(lc, g, v0, psi, eo);
        j["mode"] = "modulated";
        j["psi"] = a.psi;
        j["eps"] = a.eps;
        j["fit"] = io::trace_summary(run.trace);
        j["epsilon"] = run.epsilon;
        j["max_smallness"] = run.max_smallness;
        j["hypothesis_violated"] = run.hypothesis_violated;
        j["modulated_bounds"] = json::array();
        for (int s = 0; s <= 2; ++s) {
            json e = io::to_json(modulated_bound_fit(run, s));
            e["s"] = s;
            j["modulated_bounds"].push_back(e);
        }
        if (c.csv_out()) io::write_text((out / "trace.csv").string(), io::trace_csv(run.trace));
    }
    if (c.json_out()) io::write_json((out / "evolve.json").string(), j);
    std::cout << j.dump(2) << std::endl;
    return 0;
}

// ---------------------------------------------------------------- shock
struct ShockArgs {
    double gamma = 5.0 / 3.0;
    double amp = 1.0;
    double nu = 1.0;
    double tau_minus = 1.0;
    double tau_plus = 2.0;
    double half_width = 0.0;
    int n = 801;
    bool unit_viscosity_form = false;
    bool large_constant = false;
    double large_constant_c = 10.0;
    bool evolve = false;
    double t = 3.0;
    double dt = 0.01;
    unsigned seed = 1;
};

int cmd_shock(const ShockArgs& a, const Common& c) {
    ModelParams p;
    p.system = SystemKind::IsentropicGas;
    p.gas_gamma = a.gamma;
    p.gas_amp = a.amp;
    p.nu = a.nu;
    ShockOptions so;
    so.half_width = a.half_width;
    so.n = a.n;
    so.unit_viscosity_form = a.unit_viscosity_form;
    const ShockProfile s = solve_shock_profile(p, a.tau_minus, a.tau_plus, so);
    const ShockInterpolant I = build_interpolant(s);
    ShockGaugeOptions go;
    go.large_constant = a.large_constant;
    go.large_constant_C = a.large_constant_c;
    const ShockGauge g = build_shock_gauge(s, I, go);
    const fs::path out = prepare_out(c.out);
    json summary{{"speed", s.speed},
                 {"rh_residual", s.rh_residual},
                 {"decay_rate", s.decay_rate},
                 {"half_width", s.half_width},
                 {"interpolant_width", I.width},
                 {"interpolant_decay", I.fitted_decay},
                 {"coercivity_min", g.triple.coercivity_min},
                 {"phi1_ratio", g.triple.phi1_max / g.triple.phi1_min},
                 {"phi2", g.triple.phi2}};
    if (a.evolve) {
        ShockEvolveOptions eo;
        eo.T = a.t;
        eo.dt = a.dt;
        eo.sample_every = 5;
        // Localized bump well inside the domain.
        FieldPair u0 = FieldPair::zeros(s.size());
        for (int j = 0; j < s.size(); ++j) {
            const double bump = std::exp(-s.x[j] * s.x[j]);
            u0.tau[j] = 1e-3 * bump;
            u0.u[j] = 1e-3 * s.x[j] * bump;
        }
        const ShockRun run = evolve_shock_linear(s, g.triple, u0, eo);
        summary["fit"] = io::trace_summary(run.trace);
        summary["boundary_ratio"] = run.boundary_ratio;
        if (c.csv_out()) io::write_text((out / "shock_trace.csv").string(), io::trace_csv(run.trace));
    }
    if (c.json_out()) {
        io::write_json((out / "shock.json").string(), io::to_json(s));
        io::write_json((out / "shock_gauge.json").string(), io::to_json(g.triple, s.x));
    }
    if (c.csv_out()) {
        io::write_text((out / "shock.csv").string(), io::shock_csv(s));
        io::write_text((out / "shock_gauge.csv").string(), io::gauge_csv(g.triple, s.x));
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    try {
        args = merge_env(merge_config(std::vector<std::string>(argv + 1, argv + argc)));
    } catch (const Error& e) {
        return report(e.category(), e.what());
    }

    CLI::App app{"Roll waves and viscous shocks: profiles, spectra, gauge energies, damping"};
    app.require_subcommand(1);
    Common common;

    ProfileArgs pa;
    auto* profile = app.add_subcommand("profile", "solve a periodic roll wave");
    add_common(profile, common);
    profile->add_option("--froude", pa.froude)->capture_default_str();
    profile->add_option("--nu", pa.nu)->capture_default_str();
    profile->add_option("--period", pa.period)->capture_default_str();
    profile->add_option("--n", pa.n)->capture_default_str();
    profile->add_option("--continue-to", pa.continue_to, "continue in F to this value");
    profile->add_option("--seed-amplitude", pa.seed_amplitude)->capture_default_str();
    profile->add_option("--seed-froude", pa.seed_froude, "F at which the small-amplitude seed is built")
        ->capture_default_str();

    ScanArgs sa;
    auto* scan = app.add_subcommand("scan", "slope conditions and stability along continuation branches");
    add_common(scan, common);
    scan->add_option("--froude-min", sa.froude_min)->capture_default_str();
    scan->add_option("--froude-max", sa.froude_max)->capture_default_str();
    scan->add_option("--froude-step", sa.froude_step)->capture_default_str();
    scan->add_option("--froude-list", sa.froude_list, "explicit F values (overrides min/max/step)");
    scan->add_option("--period", sa.periods, "one or more periods")->capture_default_str();
    scan->add_option("--nu", sa.nu)->capture_default_str();
    scan->add_option("--n", sa.n)->capture_default_str();
    scan->add_option("--seed-froude", sa.seed_froude, "F at which each branch is seeded")->capture_default_str();
    scan->add_flag("--no-stability", sa.no_stability);
    scan->add_flag("--no-eta", sa.no_eta);
    scan->add_option("--seed", sa.seed)->capture_default_str();

    SpectrumArgs spa;
    auto* spectrum = app.add_subcommand("spectrum", "Floquet-Bloch spectrum and stability classification");
    add_common(spectrum, common);
    spectrum->add_option("--profile", spa.profile)->required();
    spectrum->add_option("--xi-points", spa.xi_points)->capture_default_str();
    spectrum->add_option("--modes", spa.modes)->capture_default_str();
    spectrum->add_option("--refine-levels", spa.refine_levels)->capture_default_str();
    spectrum->add_option("--tail", spa.tail)->capture_default_str();

    EvolveArgs ea;
    auto* evolve = app.add_subcommand("evolve", "linear, nonlinear or modulated time evolution");
    add_common(evolve, common);
    evolve->add_option("--profile", ea.profile)->required();
    evolve->add_flag("--linear", ea.linear);
    evolve->add_flag("--nonlinear", ea.nonlinear);
    evolve->add_flag("--modulated", ea.modulated);
    evolve->add_option("--t", ea.t)->capture_default_str();
    evolve->add_option("--dt", ea.dt)->capture_default_str();
    evolve->add_option("--sample-every", ea.sample_every)->capture_default_str();
    evolve->add_option("--snapshot-every", ea.snapshot_every)->capture_default_str();
    evolve->add_option("--amplitude", ea.amplitude)->capture_default_str();
    evolve->add_option("--max-mode", ea.max_mode)->capture_default_str();
    evolve->add_option("--seed", ea.seed)->capture_default_str();
    evolve->add_option("--psi", ea.psi, "phase formula in x, t, Xi, eps")->capture_default_str();
    evolve->add_option("--eps", ea.eps)->capture_default_str();
    evolve->add_option("--epsilon-bound", ea.epsilon_bound, "smallness bound; 0 uses 1e-2 ||U_bar||_H1");
    evolve->add_option("--delta-every", ea.delta_every)->capture_default_str();
    evolve->add_flag("--keep-neutral", ea.keep_neutral,
                     "linear runs: keep the neutral (lambda = 0) component of the initial data");

    GaugeArgs ga;
    auto* gauge = app.add_subcommand("gauge", "gauge weights and coercivity");
    add_common(gauge, common);
    gauge->add_option("--profile", ga.profile)->required();
    gauge->add_option("--phi2", ga.phi2, "fixed phi2; omitted selects the sweep");
    gauge->add_option("--weight", ga.weight)->check(CLI::IsMember({"unit", "cubic"}))->capture_default_str();

    ShockArgs sha;
    auto* shock = app.add_subcommand("shock", "viscous shock profile, interpolant and gauge");
    add_common(shock, common);
    shock->add_option("--gamma", sha.gamma)->capture_default_str();
    shock->add_option("--amp", sha.amp)->capture_default_str();
    shock->add_option("--nu", sha.nu)->capture_default_str();
    shock->add_option("--tau-minus", sha.tau_minus)->capture_default_str();
    shock->add_option("--tau-plus", sha.tau_plus)->capture_default_str();
    shock->add_option("--half-width", sha.half_width, "0 selects 20 / decay rate")->capture_default_str();
    shock->add_option("--n", sha.n)->capture_default_str();
    shock->add_flag("--unit-viscosity-form", sha.unit_viscosity_form);
    shock->add_flag("--large-constant", sha.large_constant);
    shock->add_option("--large-constant-c", sha.large_constant_c)->capture_default_str();
    shock->add_flag("--evolve", sha.evolve);
    shock->add_option("--t", sha.t)->capture_default_str();
    shock->add_option("--dt", sha.dt)->capture_default_str();
    shock->add_option("--seed", sha.seed)->capture_default_str();

    auto* version = app.add_subcommand("version", "print the version");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("domain", e.what());
    }

    try {
        if (*version) {
            std::cout << "rollwave " << kVersion << std::endl;
            return 0;
        }
        if (*profile) return cmd_profile(pa, common);
        if (*scan) return cmd_scan(sa, common);
        if (*spectrum) return cmd_spectrum(spa, common);
        if (*gauge) return cmd_gauge(ga, common);
        if (*evolve) return cmd_evolve(ea, common);
        if (*shock) return cmd_shock(sha, common);
    } catch (const Error& e) {
        return report(e.category(), e.what());
    } catch (const std::exception& e) {
        return report("numerical", e.what());
    }
    return 0;
}
