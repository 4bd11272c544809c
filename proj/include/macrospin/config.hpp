#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrospin/calibration.hpp"
#include "macrospin/conduction.hpp"
#include "macrospin/device.hpp"
#include "macrospin/drive.hpp"
#include "macrospin/montecarlo.hpp"
#include "macrospin/solvers.hpp"

namespace macrospin {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Initial polar angle, either literal or resolved against the device's
/// thermal angle after derivation ("theta0" -> sqrt(1/Delta),
/// "theta0_prime" -> c_w * theta0).
struct InitialAngleSpec {
    enum class Kind { number, theta0, theta0_prime } kind = Kind::theta0;
    double value = 0.0;
};

struct CalibrationSection {
    bool present = false;
    SurrogateMode mode = SurrogateMode::fictitious;
    std::vector<CornerTarget> corners;
    CalibrationOptions options;
};

/// Parsed scenario file. `raw` keeps the post-override document for the
/// reproducibility manifest; the typed fields drive the simulation.
struct SimConfig {
    nlohmann::json raw;
    DeviceParams device;
    Drive drive;
    std::string conduction_table; ///< optional CSV path, relative to the config file
    SolverConfig solver;
    ThermalConfig thermal;
    bool window_enabled = false;
    double window_c_w = 1.0;
    InitialAngleSpec initial_theta;
    double initial_phi = 0.0;
    EnsembleConfig ensemble;
    bool ensemble_present = false;
    std::vector<double> wer_currents;
    CalibrationSection calibration;
    std::string base_dir; ///< directory of the config file, for relative paths
};

namespace detail {

[[noreturn]] inline void cfg_fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

inline double as_num(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) cfg_fail(path, "expected a number");
    return j.get<double>();
}

inline bool as_bool(const nlohmann::json& j, const std::string& path) {
    if (!j.is_boolean()) cfg_fail(path, "expected true/false");
    return j.get<bool>();
}

inline std::string as_str(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) cfg_fail(path, "expected a string");
    return j.get<std::string>();
}

inline Vec3 as_vec3(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) cfg_fail(path, "expected [x, y, z]");
    return {as_num(j[0], path + "[0]"), as_num(j[1], path + "[1]"), as_num(j[2], path + "[2]")};
}

/// Reject keys outside the documented schema, recursively. Catches typos
/// that would otherwise silently fall back to defaults.
inline void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                       const std::string& path) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + (path.empty() ? key : path + "." + key) +
                              "'");
}

inline void validate_config_keys(const nlohmann::json& j) {
    check_keys(j, {"device", "drive", "conduction", "solver", "thermal", "window", "initial",
                   "ensemble", "wer_sweep", "calibration"},
               "");
    if (j.contains("device"))
        check_keys(j["device"],
                   {"ms", "alpha", "gamma", "p_spin", "lambda_stt", "eps_prime", "ki", "xi",
                    "t_fl", "t_ox", "diameter", "temperature", "r_p", "r_ap", "m_p", "volume",
                    "demag"},
                   "device");
    if (j.contains("drive")) {
        check_keys(j["drive"], {"current", "field"}, "drive");
        if (j["drive"].contains("current")) {
            check_keys(j["drive"]["current"], {"constant", "points", "pulses"}, "drive.current");
            if (j["drive"]["current"].contains("pulses")) {
                const auto& p = j["drive"]["current"]["pulses"];
                check_keys(p, {"base", "segments"}, "drive.current.pulses");
                if (p.contains("segments") && p["segments"].is_array())
                    for (std::size_t i = 0; i < p["segments"].size(); ++i)
                        check_keys(p["segments"][i],
                                   {"delay", "rise", "width", "fall", "amplitude"},
                                   "drive.current.pulses.segments[" + std::to_string(i) + "]");
            }
        }
        if (j["drive"].contains("field")) check_keys(j["drive"]["field"], {"points"}, "drive.field");
    }
    if (j.contains("conduction")) check_keys(j["conduction"], {"table"}, "conduction");
    if (j.contains("solver"))
        check_keys(j["solver"],
                   {"scheme", "t_end", "dt", "dt_min", "dt_max", "rel_tol", "abs_tol", "seed",
                    "record_stride", "log_steps"},
                   "solver");
    if (j.contains("thermal"))
        check_keys(j["thermal"], {"mode", "c_f", "dt_ref", "literal_scale"}, "thermal");
    if (j.contains("window")) check_keys(j["window"], {"enabled", "c_w"}, "window");
    if (j.contains("initial")) check_keys(j["initial"], {"theta", "phi"}, "initial");
    if (j.contains("ensemble"))
        check_keys(j["ensemble"], {"n_runs", "master_seed", "workers"}, "ensemble");
    if (j.contains("wer_sweep")) check_keys(j["wer_sweep"], {"currents"}, "wer_sweep");
    if (j.contains("calibration")) {
        check_keys(j["calibration"], {"mode", "corners", "bracket", "rel_tol"}, "calibration");
        if (j["calibration"].contains("corners") && j["calibration"]["corners"].is_array())
            for (std::size_t i = 0; i < j["calibration"]["corners"].size(); ++i)
                check_keys(j["calibration"]["corners"][i], {"name", "percentile"},
                           "calibration.corners[" + std::to_string(i) + "]");
    }
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "naive_euler") return Scheme::naive_euler;
    if (s == "stochastic_heun") return Scheme::stochastic_heun;
    if (s == "adaptive_rk") return Scheme::adaptive_rk;
    throw ConfigError("solver.scheme '" + s +
                      "': expected naive_euler|stochastic_heun|adaptive_rk");
}

inline ThermalMode thermal_mode_from_string(const std::string& s) {
    if (s == "off") return ThermalMode::off;
    if (s == "stochastic") return ThermalMode::stochastic;
    if (s == "fictitious") return ThermalMode::fictitious;
    throw ConfigError("thermal.mode '" + s + "': expected off|stochastic|fictitious");
}

inline Waveform parse_current(const nlohmann::json& c) {
    const int given = int(c.contains("constant")) + int(c.contains("points")) +
                      int(c.contains("pulses"));
    if (given != 1)
        throw ConfigError("drive.current: give exactly one of constant|points|pulses");
    if (c.contains("constant"))
        return Waveform::constant(as_num(c["constant"], "drive.current.constant"));
    if (c.contains("points")) {
        const auto& pts = c["points"];
        if (!pts.is_array() || pts.empty())
            throw ConfigError("drive.current.points: expected a nonempty [[t, value], ...] array");
        Waveform w;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string p = "drive.current.points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2) cfg_fail(p, "expected [t, value]");
            w.points.push_back({as_num(pts[i][0], p + "[0]"), as_num(pts[i][1], p + "[1]")});
        }
        w.check_sorted();
        return w;
    }
    const auto& p = c["pulses"];
    const double base = p.contains("base") ? as_num(p["base"], "drive.current.pulses.base") : 0.0;
    if (!p.contains("segments") || !p["segments"].is_array() || p["segments"].empty())
        throw ConfigError("drive.current.pulses.segments: expected a nonempty array");
    std::vector<PulseSegment> segs;
    for (std::size_t i = 0; i < p["segments"].size(); ++i) {
        const auto& s = p["segments"][i];
        const std::string sp = "drive.current.pulses.segments[" + std::to_string(i) + "]";
        PulseSegment seg;
        if (s.contains("delay")) seg.delay = as_num(s["delay"], sp + ".delay");
        if (s.contains("rise")) seg.rise = as_num(s["rise"], sp + ".rise");
        if (!s.contains("width")) cfg_fail(sp, "missing width");
        seg.width = as_num(s["width"], sp + ".width");
        if (s.contains("fall")) seg.fall = as_num(s["fall"], sp + ".fall");
        if (!s.contains("amplitude")) cfg_fail(sp, "missing amplitude");
        seg.amplitude = as_num(s["amplitude"], sp + ".amplitude");
        segs.push_back(seg);
    }
    return pulse_train(segs, base);
}

inline FieldWaveform parse_field(const nlohmann::json& f) {
    FieldWaveform w;
    if (!f.contains("points")) return w;
    const auto& pts = f["points"];
    if (!pts.is_array()) throw ConfigError("drive.field.points: expected [[t, [x,y,z]], ...]");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string p = "drive.field.points[" + std::to_string(i) + "]";
        if (!pts[i].is_array() || pts[i].size() != 2) cfg_fail(p, "expected [t, [x,y,z]]");
        w.points.push_back({as_num(pts[i][0], p + "[0]"), as_vec3(pts[i][1], p + "[1]")});
    }
    w.check_sorted();
    return w;
}

} // namespace detail

/// Apply one dotted-path override ("solver.rel_tol=1e-6") onto the parsed
/// document. Values parse as JSON scalars, falling back to a plain string;
/// numeric path segments index arrays. Keys may be created, but still face
/// schema validation afterwards.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "': expected key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(value_text, nullptr, false);
    if (value.is_discarded()) value = value_text; // unquoted string

    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string seg = path.substr(start, dot - start);
        if (seg.empty()) throw ConfigError("override '" + assignment + "': empty path segment");
        const bool is_index = seg.find_first_not_of("0123456789") == std::string::npos;
        if (is_index) {
            if (!node->is_array())
                throw ConfigError("override '" + assignment + "': '" + seg +
                                  "' indexes a non-array");
            const std::size_t idx = std::stoul(seg);
            if (idx >= node->size())
                throw ConfigError("override '" + assignment + "': index " + seg +
                                  " out of range");
            node = &(*node)[idx];
        } else {
            if (!node->is_object() && !node->is_null())
                throw ConfigError("override '" + assignment + "': '" + seg +
                                  "' descends into a non-object");
            node = &(*node)[seg];
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

/// Parse + validate a scenario document (post-override JSON).
inline SimConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".") {
    detail::validate_config_keys(j);
    SimConfig c;
    c.raw = j;
    c.base_dir = base_dir;

    if (!j.contains("device")) throw ConfigError("missing required section 'device'");
    {
        const auto& d = j["device"];
        auto num = [&](const char* k, double& field, bool required) {
            if (d.contains(k))
                field = detail::as_num(d[k], std::string("device.") + k);
            else if (required)
                throw ConfigError(std::string("device.") + k + " is required");
        };
        num("ms", c.device.ms, true);
        num("alpha", c.device.alpha, true);
        num("gamma", c.device.gamma, true);
        num("p_spin", c.device.p_spin, true);
        num("lambda_stt", c.device.lambda_stt, false);
        num("eps_prime", c.device.eps_prime, false);
        num("ki", c.device.ki, true);
        num("xi", c.device.xi, false);
        num("t_fl", c.device.t_fl, true);
        num("t_ox", c.device.t_ox, false);
        num("diameter", c.device.diameter, true);
        num("temperature", c.device.temperature, true);
        num("r_p", c.device.r_p, true);
        num("r_ap", c.device.r_ap, true);
        num("volume", c.device.volume, false);
        if (d.contains("m_p")) c.device.m_p = detail::as_vec3(d["m_p"], "device.m_p");
        if (d.contains("demag")) c.device.demag = detail::as_vec3(d["demag"], "device.demag");
    }

    if (j.contains("drive")) {
        const auto& dr = j["drive"];
        if (dr.contains("current")) c.drive.current = detail::parse_current(dr["current"]);
        if (dr.contains("field")) c.drive.h_ext = detail::parse_field(dr["field"]);
    }
    if (j.contains("conduction") && j["conduction"].contains("table"))
        c.conduction_table = detail::as_str(j["conduction"]["table"], "conduction.table");

    if (!j.contains("solver")) throw ConfigError("missing required section 'solver'");
    {
        const auto& s = j["solver"];
        if (s.contains("scheme"))
            c.solver.scheme =
                detail::scheme_from_string(detail::as_str(s["scheme"], "solver.scheme"));
        if (!s.contains("t_end")) throw ConfigError("solver.t_end is required");
        c.solver.t_end = detail::as_num(s["t_end"], "solver.t_end");
        if (s.contains("dt")) c.solver.dt = detail::as_num(s["dt"], "solver.dt");
        if (s.contains("dt_min")) c.solver.dt_min = detail::as_num(s["dt_min"], "solver.dt_min");
        if (s.contains("dt_max")) c.solver.dt_max = detail::as_num(s["dt_max"], "solver.dt_max");
        if (s.contains("rel_tol"))
            c.solver.rel_tol = detail::as_num(s["rel_tol"], "solver.rel_tol");
        if (s.contains("abs_tol"))
            c.solver.abs_tol = detail::as_num(s["abs_tol"], "solver.abs_tol");
        if (s.contains("seed"))
            c.solver.seed = static_cast<std::uint64_t>(detail::as_num(s["seed"], "solver.seed"));
        if (s.contains("record_stride"))
            c.solver.record_stride =
                static_cast<int>(detail::as_num(s["record_stride"], "solver.record_stride"));
        if (s.contains("log_steps"))
            c.solver.log_steps = detail::as_bool(s["log_steps"], "solver.log_steps");
    }

    if (j.contains("thermal")) {
        const auto& t = j["thermal"];
        if (t.contains("mode"))
            c.thermal.mode =
                detail::thermal_mode_from_string(detail::as_str(t["mode"], "thermal.mode"));
        if (t.contains("c_f")) c.thermal.c_f = detail::as_num(t["c_f"], "thermal.c_f");
        if (t.contains("dt_ref")) c.thermal.dt_ref = detail::as_num(t["dt_ref"], "thermal.dt_ref");
        if (t.contains("literal_scale"))
            c.thermal.literal_scale = detail::as_bool(t["literal_scale"], "thermal.literal_scale");
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("enabled")) c.window_enabled = detail::as_bool(w["enabled"], "window.enabled");
        if (w.contains("c_w")) c.window_c_w = detail::as_num(w["c_w"], "window.c_w");
    }
    if (j.contains("initial")) {
        const auto& ini = j["initial"];
        if (ini.contains("theta")) {
            if (ini["theta"].is_string()) {
                const std::string s = ini["theta"].get<std::string>();
                if (s == "theta0")
                    c.initial_theta.kind = InitialAngleSpec::Kind::theta0;
                else if (s == "theta0_prime")
                    c.initial_theta.kind = InitialAngleSpec::Kind::theta0_prime;
                else
                    throw ConfigError("initial.theta '" + s +
                                      "': expected a number, \"theta0\" or \"theta0_prime\"");
            } else {
                c.initial_theta.kind = InitialAngleSpec::Kind::number;
                c.initial_theta.value = detail::as_num(ini["theta"], "initial.theta");
            }
        }
        if (ini.contains("phi")) c.initial_phi = detail::as_num(ini["phi"], "initial.phi");
    }
    if (j.contains("ensemble")) {
        const auto& e = j["ensemble"];
        c.ensemble_present = true;
        if (!e.contains("n_runs")) throw ConfigError("ensemble.n_runs is required");
        c.ensemble.n_runs = static_cast<int>(detail::as_num(e["n_runs"], "ensemble.n_runs"));
        if (e.contains("master_seed"))
            c.ensemble.master_seed =
                static_cast<std::uint64_t>(detail::as_num(e["master_seed"], "ensemble.master_seed"));
        if (e.contains("workers"))
            c.ensemble.workers = static_cast<int>(detail::as_num(e["workers"], "ensemble.workers"));
    }
    if (j.contains("wer_sweep")) {
        const auto& w = j["wer_sweep"];
        if (!w.contains("currents") || !w["currents"].is_array() || w["currents"].empty())
            throw ConfigError("wer_sweep.currents: expected a nonempty number array");
        for (std::size_t i = 0; i < w["currents"].size(); ++i)
            c.wer_currents.push_back(
                detail::as_num(w["currents"][i], "wer_sweep.currents[" + std::to_string(i) + "]"));
    }
    if (j.contains("calibration")) {
        const auto& cal = j["calibration"];
        c.calibration.present = true;
        if (cal.contains("mode"))
            c.calibration.mode =
                surrogate_mode_from_string(detail::as_str(cal["mode"], "calibration.mode"));
        if (!cal.contains("corners") || !cal["corners"].is_array() || cal["corners"].empty())
            throw ConfigError("calibration.corners: expected a nonempty array");
        for (std::size_t i = 0; i < cal["corners"].size(); ++i) {
            const auto& t = cal["corners"][i];
            const std::string p = "calibration.corners[" + std::to_string(i) + "]";
            CornerTarget tgt;
            if (!t.contains("name")) detail::cfg_fail(p, "missing name");
            tgt.name = detail::as_str(t["name"], p + ".name");
            if (!t.contains("percentile")) detail::cfg_fail(p, "missing percentile");
            tgt.percentile = detail::as_num(t["percentile"], p + ".percentile");
            c.calibration.corners.push_back(tgt);
        }
        if (cal.contains("bracket")) {
            const auto& b = cal["bracket"];
            if (!b.is_array() || b.size() != 2)
                throw ConfigError("calibration.bracket: expected [lo, hi]");
            c.calibration.options.bracket_lo = detail::as_num(b[0], "calibration.bracket[0]");
            c.calibration.options.bracket_hi = detail::as_num(b[1], "calibration.bracket[1]");
        }
        if (cal.contains("rel_tol"))
            c.calibration.options.rel_tol = detail::as_num(cal["rel_tol"], "calibration.rel_tol");
    }
    return c;
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse failure in '" + path + "': " + e.what());
    }
    const std::size_t slash = path.find_last_of('/');
    return parse_config(j, slash == std::string::npos ? "." : path.substr(0, slash));
}

/// Materialize the runnable scenario: validates the device, derives the
/// energetics, resolves the window edge and symbolic initial angles, and
/// loads any conduction lookup table.
inline Scenario make_scenario(const SimConfig& c, const PhysicalConstants& pc = {}) {
    Scenario sc;
    sc.device = c.device;
    try {
        validate(sc.device);
        sc.derived = derive(sc.device, pc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("device: ") + e.what());
    }
    sc.drive = c.drive;
    sc.conduction.r_p = sc.device.r_p;
    sc.conduction.r_ap = sc.device.r_ap;
    if (!c.conduction_table.empty()) {
        const std::string path = c.conduction_table.front() == '/'
                                     ? c.conduction_table
                                     : c.base_dir + "/" + c.conduction_table;
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open conduction table '" + path + "'");
        try {
            sc.conduction.r_table = parse_table_csv(in);
        } catch (const std::exception& e) {
            throw ConfigError("conduction table '" + path + "': " + e.what());
        }
    }
    sc.solver = c.solver;
    sc.thermal = c.thermal;
    sc.window.enabled = c.window_enabled;
    sc.window.c_w = c.window_c_w;
    sc.window.theta0_prime = c.window_c_w * sc.derived.theta0;
    switch (c.initial_theta.kind) {
    case InitialAngleSpec::Kind::number: sc.initial.theta = c.initial_theta.value; break;
    case InitialAngleSpec::Kind::theta0: sc.initial.theta = sc.derived.theta0; break;
    case InitialAngleSpec::Kind::theta0_prime: sc.initial.theta = sc.window.theta0_prime; break;
    }
    sc.initial.phi = c.initial_phi;
    return sc;
}

/// Fully resolved document for the reproducibility manifest: the
/// post-override config plus everything derived from it.
inline nlohmann::json resolved_json(const SimConfig& c, const Scenario& sc) {
    nlohmann::json j = c.raw;
    j["resolved"] = {{"volume", sc.derived.volume},
                     {"demag", {sc.derived.demag.x, sc.derived.demag.y, sc.derived.demag.z}},
                     {"gamma_prime", sc.derived.gamma_prime},
                     {"h_k_eff", sc.derived.h_k_eff},
                     {"delta", sc.derived.delta},
                     {"theta0", sc.derived.theta0},
                     {"theta0_prime", sc.window.theta0_prime},
                     {"initial_theta", sc.initial.theta},
                     {"initial_phi", sc.initial.phi},
                     {"seed", sc.solver.seed}};
    return j;
}

} // namespace macrospin
