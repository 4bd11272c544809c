// Command-line driver: transient runs, Monte Carlo ensembles, WER sweeps,
// corner calibration, solver validation, and compact-model emission.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "macrospin/macrospin.hpp"

namespace fs = std::filesystem;
using namespace macrospin;

namespace {

// Exit codes: 0 success, 2 config/usage, 3 numerical failure, 4 I/O.
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Args {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string corner;
    std::string corners_file;
    std::string reference;
};

void machine_error(const char* kind, const std::string& message) {
    nlohmann::json j = {{"error", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

template <typename Fn> void write_csv(const fs::path& path, Fn&& fn) {
    std::ostringstream ss;
    fn(ss);
    write_file(path, ss.str());
}

/// Load, override, parse. Everything here maps to exit code 2.
SimConfig load(const Args& a) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(a.config_path));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("config parse failure in '" + a.config_path + "': " + e.what());
    }
    for (const auto& ov : a.overrides) apply_override(j, ov);
    const std::size_t slash = a.config_path.find_last_of('/');
    SimConfig c = parse_config(j, slash == std::string::npos ? "." : a.config_path.substr(0, slash));
    if (a.seed) {
        c.solver.seed = *a.seed;
        c.ensemble.master_seed = *a.seed;
    }
    if (a.workers) {
        c.ensemble.workers = *a.workers;
    } else if (!c.raw.contains("ensemble") || !c.raw["ensemble"].contains("workers")) {
        if (const char* env = std::getenv("MACROSPIN_WORKERS"))
            c.ensemble.workers = std::atoi(env);
    }
    return c;
}

void write_manifest(const fs::path& out_dir, const char* command, const Args& a,
                    const SimConfig& c, const Scenario& sc,
                    const nlohmann::json& extra = nlohmann::json::object()) {
    nlohmann::json m;
    m["tool"] = {{"name", "macrospin"}, {"version", version()}};
    m["command"] = command;
    m["config_path"] = a.config_path;
    m["overrides"] = a.overrides;
    m["output_dir"] = out_dir.string();
    m["config"] = resolved_json(c, sc);
    m["seeds"] = {{"solver", sc.solver.seed}, {"ensemble_master", c.ensemble.master_seed}};
    m["workers"] = c.ensemble.workers;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out(const Args& a) {
    fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + a.out_dir + "': " + ec.message());
    return dir;
}

CalibrationResult load_corner_library(const std::string& path) {
    return corner_library_import(read_file(path));
}

// ---------------------------------------------------------------------------

int cmd_transient(const Args& a) {
    const SimConfig c = load(a);
    Scenario sc = make_scenario(c);
    nlohmann::json extra;
    if (!a.corner.empty()) {
        if (a.corners_file.empty())
            throw ConfigError("--corner requires --corners <library.json>");
        const CalibrationResult lib = load_corner_library(a.corners_file);
        if (!lib.coefficients.count(a.corner))
            throw ConfigError("corner '" + a.corner + "' not found in '" + a.corners_file + "'");
        sc = corner_scenario(sc, lib.mode, lib.coefficients.at(a.corner));
        extra["corner"] = {{"name", a.corner},
                           {"mode", to_string(lib.mode)},
                           {"coefficient", lib.coefficients.at(a.corner)},
                           {"library", a.corners_file}};
    }
    const Trajectory tr = simulate(sc);
    const fs::path out = prepare_out(a);
    write_csv(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    write_csv(out / "events.csv", [&](std::ostream& os) { write_events_csv(os, tr); });
    if (sc.solver.log_steps)
        write_csv(out / "steps.csv", [&](std::ostream& os) { write_steps_csv(os, tr); });
    extra["result"] = {{"switched", tr.switched()},
                       {"events", tr.events.size()},
                       {"rhs_evaluations", tr.rhs_evaluations},
                       {"steps_accepted", tr.steps_accepted},
                       {"steps_rejected", tr.steps_rejected}};
    if (tr.switch_time()) extra["result"]["switch_time"] = *tr.switch_time();
    write_manifest(out, "transient", a, c, sc, extra);
    std::printf("transient: %zu samples, switched=%s", tr.times.size(),
                tr.switched() ? "yes" : "no");
    if (tr.switch_time()) std::printf(" at t=%.6g s", *tr.switch_time());
    std::printf(" -> %s\n", out.string().c_str());
    return 0;
}

int cmd_ensemble(const Args& a) {
    const SimConfig c = load(a);
    if (!c.ensemble_present) throw ConfigError("ensemble command needs an 'ensemble' section");
    const Scenario sc = make_scenario(c);
    const EnsembleResult r = run_ensemble(sc, c.ensemble);
    const fs::path out = prepare_out(a);
    write_csv(out / "ensemble.csv",
              [&](std::ostream& os) { write_ensemble_summary_csv(os, r.stats); });
    write_csv(out / "runs.csv", [&](std::ostream& os) { write_runs_csv(os, r.outcomes); });
    nlohmann::json extra;
    extra["result"] = {{"n_total", r.stats.n_total},
                       {"n_switched", r.stats.n_switched},
                       {"wer", r.stats.wer},
                       {"ensemble_digest", ensemble_digest(c.ensemble, r.outcomes)}};
    write_manifest(out, "ensemble", a, c, sc, extra);
    std::printf("ensemble: %d runs, %d switched, WER=%.4g [%.4g, %.4g] -> %s\n", r.stats.n_total,
                r.stats.n_switched, r.stats.wer, r.stats.wer_lo, r.stats.wer_hi,
                out.string().c_str());
    return 0;
}

int cmd_wer_sweep(const Args& a) {
    const SimConfig c = load(a);
    if (!c.ensemble_present) throw ConfigError("wer-sweep command needs an 'ensemble' section");
    if (c.wer_currents.empty()) throw ConfigError("wer-sweep command needs a 'wer_sweep' section");
    const Scenario sc = make_scenario(c);
    auto factory = [&](double current) {
        Scenario s = sc;
        s.drive.current = Waveform::constant(current);
        return s;
    };
    std::vector<std::string> warnings;
    const std::vector<WerPoint> points = wer_curve(c.ensemble, c.wer_currents, factory, &warnings);
    std::vector<EnsembleStats> stats;
    stats.reserve(points.size());
    for (const auto& p : points) stats.push_back(p.stats);
    const fs::path out = prepare_out(a);
    write_csv(out / "wer.csv",
              [&](std::ostream& os) { write_wer_csv(os, c.wer_currents, stats); });
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    nlohmann::json extra;
    extra["result"] = {{"points", stats.size()}, {"warnings", warnings}};
    write_manifest(out, "wer-sweep", a, c, sc, extra);
    std::printf("wer-sweep: %zu grid points -> %s\n", stats.size(), out.string().c_str());
    return 0;
}

int cmd_calibrate(const Args& a) {
    const SimConfig c = load(a);
    if (!c.ensemble_present) throw ConfigError("calibrate command needs an 'ensemble' section");
    if (!c.calibration.present)
        throw ConfigError("calibrate command needs a 'calibration' section");
    const Scenario sc = make_scenario(c);
    const EnsembleResult r = run_ensemble(sc, c.ensemble);
    const CalibrationResult cal = calibrate(c.calibration.mode, c.calibration.corners, r,
                                            c.ensemble, sc, c.calibration.options);
    const fs::path out = prepare_out(a);
    write_file(out / "corners.json", corner_library_export(cal));
    write_csv(out / "ensemble.csv",
              [&](std::ostream& os) { write_ensemble_summary_csv(os, r.stats); });
    write_csv(out / "runs.csv", [&](std::ostream& os) { write_runs_csv(os, r.outcomes); });
    nlohmann::json extra;
    for (const auto& [name, coeff] : cal.coefficients)
        extra["result"][name] = {{"coefficient", coeff},
                                 {"residual", cal.residuals.at(name)},
                                 {"target_time", cal.target_times.at(name)}};
    write_manifest(out, "calibrate", a, c, sc, extra);
    std::printf("calibrate (%s):\n", to_string(cal.mode));
    for (const auto& [name, coeff] : cal.coefficients)
        std::printf("  %-12s c=%-12.6g residual=%+.3g%% target=%.6g s\n", name.c_str(), coeff,
                    100.0 * cal.residuals.at(name), cal.target_times.at(name));
    std::printf("-> %s\n", (out / "corners.json").string().c_str());
    return 0;
}

int cmd_validate(const Args& a) {
    const SimConfig c = load(a);
    if (a.reference.empty()) throw ConfigError("validate requires --reference <trajectory.csv>");
    const Scenario sc = make_scenario(c);
    RefTrace ref;
    {
        std::ifstream in(a.reference);
        if (!in) throw IoError("cannot open reference '" + a.reference + "'");
        ref = read_trajectory_csv(in);
    }
    std::vector<Scheme> schemes;
    if (sc.thermal.mode == ThermalMode::stochastic)
        schemes = {Scheme::stochastic_heun};
    else
        schemes = {Scheme::naive_euler, Scheme::adaptive_rk};

    const fs::path out = prepare_out(a);
    std::ostringstream csv;
    csv << "scheme,rmse_mz,rhs_evaluations,steps_accepted,steps_rejected\n";
    std::printf("%-16s %-12s %-14s %-10s %s\n", "scheme", "rmse_mz", "rhs_evals", "accepted",
                "rejected");
    for (Scheme scheme : schemes) {
        Scenario run = sc;
        run.solver.scheme = scheme;
        const Trajectory tr = simulate(run);
        const double rmse = rmse_mz(tr, ref.t, ref.mz);
        const char* name = scheme == Scheme::naive_euler     ? "naive_euler"
                           : scheme == Scheme::adaptive_rk   ? "adaptive_rk"
                                                             : "stochastic_heun";
        std::printf("%-16s %-12.4e %-14zu %-10zu %zu\n", name, rmse, tr.rhs_evaluations,
                    tr.steps_accepted, tr.steps_rejected);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.17g,%zu,%zu,%zu\n", name, rmse, tr.rhs_evaluations,
                      tr.steps_accepted, tr.steps_rejected);
        csv << buf;
    }
    write_file(out / "validate.csv", csv.str());
    nlohmann::json extra;
    extra["reference"] = a.reference;
    write_manifest(out, "validate", a, c, sc, extra);
    return 0;
}

int cmd_emit_model(const Args& a) {
    const SimConfig c = load(a);
    if (a.corners_file.empty()) throw ConfigError("emit-model requires --corners <library.json>");
    const CalibrationResult lib = load_corner_library(a.corners_file);
    const Scenario sc = make_scenario(c); // validates the device
    ModelTemplate tmpl;
    tmpl.options.windowing = lib.mode == SurrogateMode::window;
    tmpl.options.fictitious = lib.mode == SurrogateMode::fictitious;
    tmpl.options.vcma = c.device.xi != 0.0;
    if (!a.corner.empty()) tmpl.options.default_corner = a.corner;
    const std::string text = emit_model(c.device, lib, tmpl);
    const std::vector<std::string> problems = lint_model(text);
    if (!problems.empty()) {
        std::string msg = "emitted model failed lints:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw CodegenError(msg);
    }
    const fs::path out = prepare_out(a);
    write_file(out / "model.va", text);
    nlohmann::json extra;
    extra["corner_library"] = a.corners_file;
    extra["default_corner"] = tmpl.options.default_corner;
    write_manifest(out, "emit-model", a, c, sc, extra);
    std::printf("emit-model: %zu bytes, default corner '%s' -> %s\n", text.size(),
                tmpl.options.default_corner.c_str(), (out / "model.va").string().c_str());
    return 0;
}

int dispatch(int (*cmd)(const Args&), const Args& a) {
    try {
        return cmd(a);
    } catch (const ConfigError& e) {
        machine_error("config", e.what());
        return exit_config;
    } catch (const IoError& e) {
        machine_error("io", e.what());
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        machine_error("io", e.what());
        return exit_io;
    } catch (const CsvError& e) {
        machine_error("io", e.what());
        return exit_io;
    } catch (const std::invalid_argument& e) {
        // invalid device/solver parameters discovered at validation time
        machine_error("config", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        // SimulationError, ToleranceError, EnsembleError, CalibrationError,
        // CodegenError, domain errors: numerics
        machine_error("numerical", e.what());
        return exit_numeric;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"macrospin: macrospin MTJ simulation and compact-model toolkit"};
    app.require_subcommand(1);

    Args args;
    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("-c,--config", args.config_path, "scenario config (JSON)");
        if (needs_config) opt->required();
        sub->add_option("-o,--out", args.out_dir, "output directory (default: out)");
        sub->add_option("-s,--set", args.overrides,
                        "dotted-path config override, key.path=value (repeatable)");
        sub->add_option("--seed", args.seed, "override RNG seed (solver and ensemble master)");
        sub->add_option("--workers", args.workers,
                        "worker threads (default: config, then $MACROSPIN_WORKERS, then auto)");
    };

    auto* transient = app.add_subcommand("transient", "single trajectory -> CSV");
    add_common(transient);
    transient->add_option("--corner", args.corner, "replay a calibrated corner by name");
    transient->add_option("--corners", args.corners_file, "corner library JSON (for --corner)");

    auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble -> CSV");
    add_common(ensemble);

    auto* wer = app.add_subcommand("wer-sweep", "write-error-rate vs current grid -> CSV");
    add_common(wer);

    auto* cal = app.add_subcommand("calibrate", "regress surrogate corner coefficients");
    add_common(cal);

    auto* val = app.add_subcommand("validate", "solver RMSE against a reference trajectory CSV");
    add_common(val);
    val->add_option("--reference", args.reference, "reference trajectory CSV")->required();

    auto* emit = app.add_subcommand("emit-model", "emit the compact model (Verilog-A text)");
    add_common(emit);
    emit->add_option("--corners", args.corners_file, "corner library JSON")->required();
    emit->add_option("--corner", args.corner, "default corner name (default: mean)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e); // prints usage/error text
        return rc == 0 ? 0 : exit_config;
    }

    if (transient->parsed()) return dispatch(cmd_transient, args);
    if (ensemble->parsed()) return dispatch(cmd_ensemble, args);
    if (wer->parsed()) return dispatch(cmd_wer_sweep, args);
    if (cal->parsed()) return dispatch(cmd_calibrate, args);
    if (val->parsed()) return dispatch(cmd_validate, args);
    if (emit->parsed()) return dispatch(cmd_emit_model, args);
    return exit_config;
}
