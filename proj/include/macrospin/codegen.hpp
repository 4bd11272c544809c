#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "macrospin/calibration.hpp"
#include "macrospin/device.hpp"
#include "macrospin/version.hpp"

namespace macrospin {

class CodegenError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TemplateId { spherical_idt };
enum class ConductionKind { cosine };

/// Flags selecting which physics blocks the emitted model contains. Exactly
/// one thermal surrogate (windowing or fictitious field) must be enabled.
struct ModelOptions {
    bool windowing = false;
    bool fictitious = true;
    bool vcma = false;
    ConductionKind conduction = ConductionKind::cosine;
    std::string default_corner = "mean";
    std::string module_name = "mtj_macrospin";
};

struct ModelTemplate {
    TemplateId id = TemplateId::spherical_idt;
    ModelOptions options;
};

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void emit_param(std::string& out, const std::string& name, double value,
                       const std::string& comment) {
    std::string line = "parameter real " + name + " = " + fmt_g17(value) + ";";
    if (line.size() < 46) line.append(46 - line.size(), ' ');
    out += line + " // " + comment + "\n";
}

} // namespace detail

/// Digest over every input that shapes the emitted text, stamped into the
/// model header so an artifact can be traced to its generating inputs.
inline std::string model_input_digest(const DeviceParams& d, const CalibrationResult& corners,
                                      const ModelTemplate& tmpl) {
    std::string acc = std::string("macrospin/") + version();
    for (double v : {d.ms, d.alpha, d.gamma, d.p_spin, d.lambda_stt, d.eps_prime, d.ki, d.xi,
                     d.t_fl, d.t_ox, d.diameter, d.temperature, d.r_p, d.r_ap, d.m_p.x, d.m_p.y,
                     d.m_p.z, d.volume, d.demag.x, d.demag.y, d.demag.z})
        acc += "," + detail::fmt_g17(v);
    acc += std::string(";mode=") + to_string(corners.mode);
    for (const auto& [name, c] : corners.coefficients)
        acc += ";" + name + "=" + detail::fmt_g17(c);
    acc += ";prov=" + corners.provenance.ensemble_digest;
    acc += std::string(";opts=") + (tmpl.options.windowing ? "w" : "") +
           (tmpl.options.fictitious ? "f" : "") + (tmpl.options.vcma ? "v" : "") + ";cond=cos" +
           ";corner=" + tmpl.options.default_corner + ";module=" + tmpl.options.module_name;
    return fnv1a_hex(acc);
}

/// Render the compact model as Verilog-A source. Pure function of its
/// inputs: identical inputs give byte-identical text (LF line endings, no
/// timestamps). DeviceParams are validated and derived quantities
/// (volume, demag tensor) recomputed here so the emitted parameter block is
/// always self-consistent.
inline std::string emit_model(DeviceParams params, const CalibrationResult& corners,
                              const ModelTemplate& tmpl, const PhysicalConstants& pc = {}) {
    const ModelOptions& op = tmpl.options;
    if (op.windowing == op.fictitious)
        throw CodegenError("model template must enable exactly one thermal surrogate "
                           "(windowing or fictitious field)");
    if (corners.coefficients.empty()) throw CodegenError("corner library is empty");
    if ((op.windowing && corners.mode != SurrogateMode::window) ||
        (op.fictitious && corners.mode != SurrogateMode::fictitious))
        throw CodegenError(std::string("corner library was calibrated for '") +
                           to_string(corners.mode) + "' but the template requests the other mode");
    if (!corners.coefficients.count(op.default_corner))
        throw CodegenError("default corner '" + op.default_corner + "' not in corner library");
    validate(params);
    const DerivedQuantities q = derive(params, pc);

    // Corner index map in sorted-name order (std::map iteration).
    std::vector<std::pair<std::string, double>> corner_list(corners.coefficients.begin(),
                                                            corners.coefficients.end());
    int default_index = 0;
    for (std::size_t i = 0; i < corner_list.size(); ++i)
        if (corner_list[i].first == op.default_corner) default_index = static_cast<int>(i);

    const char* coeff_sym = op.windowing ? "c_w" : "c_f";
    std::string s;
    s += "// Macrospin MTJ compact model -- spherical s-LLGS dynamics\n";
    s += std::string("// generated by: macrospin ") + version() + "\n";
    s += "// input digest: " + model_input_digest(params, corners, tmpl) + "\n";
    s += std::string("// thermal surrogate: ") +
         (op.windowing ? "Tukey window on dtheta/dt (coefficient c_w)"
                       : "fictitious thermal field (coefficient c_f)") +
         "\n";
    s += "// corner source: ensemble digest " + corners.provenance.ensemble_digest + ", seed " +
         std::to_string(corners.provenance.seed) + ", " +
         std::to_string(corners.provenance.n_runs) + " runs\n";
    s += "// corner_select map:\n";
    for (std::size_t i = 0; i < corner_list.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof line, "//   %zu = %s (%s = %.17g, residual %.3g)\n", i,
                      corner_list[i].first.c_str(), coeff_sym, corner_list[i].second,
                      corners.residuals.at(corner_list[i].first));
        s += line;
    }
    s += "//\n";
    s += "// Terminals: vp (free-layer electrode), vn (reference-layer electrode).\n";
    s += "// Positive terminal current vp->vn destabilizes the parallel state (writes AP).\n";
    s += "// All parameters in SI units. Generated file -- regenerate instead of editing.\n";
    s += "\n`include \"disciplines.vams\"\n\n";
    s += "module " + op.module_name + "(vp, vn);\n\n";
    s += "inout vp, vn;\nelectrical vp, vn;\n\n";

    s += "// device parameters\n";
    detail::emit_param(s, "ms", params.ms, "saturation magnetization [A/m]");
    detail::emit_param(s, "alpha", params.alpha, "Gilbert damping [-]");
    detail::emit_param(s, "gamma", params.gamma, "gyromagnetic ratio [rad/(s*T)]");
    detail::emit_param(s, "p_spin", params.p_spin, "spin polarization [-]");
    detail::emit_param(s, "lambda_stt", params.lambda_stt, "Slonczewski asymmetry [-]");
    detail::emit_param(s, "eps_prime", params.eps_prime, "field-like torque coefficient [-]");
    detail::emit_param(s, "ki", params.ki, "interfacial anisotropy [J/m^2]");
    detail::emit_param(s, "xi", params.xi, "VCMA coefficient [J/(V*m)]");
    detail::emit_param(s, "t_fl", params.t_fl, "free-layer thickness [m]");
    detail::emit_param(s, "t_ox", params.t_ox, "tunnel barrier thickness [m]");
    detail::emit_param(s, "diameter", params.diameter, "free-layer diameter [m]");
    detail::emit_param(s, "temperature", params.temperature, "lattice temperature [K]");
    detail::emit_param(s, "r_p", params.r_p, "parallel resistance [ohm]");
    detail::emit_param(s, "r_ap", params.r_ap, "antiparallel resistance [ohm]");
    detail::emit_param(s, "mp_x", params.m_p.x, "reference-layer unit vector x");
    detail::emit_param(s, "mp_y", params.m_p.y, "reference-layer unit vector y");
    detail::emit_param(s, "mp_z", params.m_p.z, "reference-layer unit vector z");
    s += "\n// derived geometry (regenerate when the device geometry changes)\n";
    detail::emit_param(s, "volume", q.volume, "free-layer volume [m^3]");
    detail::emit_param(s, "demag_nx", q.demag.x, "demagnetization factor Nx [-]");
    detail::emit_param(s, "demag_ny", q.demag.y, "demagnetization factor Ny [-]");
    detail::emit_param(s, "demag_nz", q.demag.z, "demagnetization factor Nz [-]");
    s += "\n// physical constants\n";
    detail::emit_param(s, "pi_const", pi, "pi");
    detail::emit_param(s, "mu0", pc.mu0, "vacuum permeability [T*m/A]");
    detail::emit_param(s, "hbar_c", pc.hbar, "reduced Planck constant [J*s]");
    detail::emit_param(s, "e_charge", pc.e, "elementary charge [C]");
    detail::emit_param(s, "kb", pc.k_b, "Boltzmann constant [J/K]");
    s += "\n// applied field and integration controls\n";
    detail::emit_param(s, "hx_app", 0.0, "applied field x [A/m]");
    detail::emit_param(s, "hy_app", 0.0, "applied field y [A/m]");
    detail::emit_param(s, "hz_app", 0.0, "applied field z [A/m]");
    detail::emit_param(s, "phi_init", 0.0, "initial azimuth [rad]");
    detail::emit_param(s, "int_abstol", 1e-9, "integration tolerance handed to idt/idtmod");
    detail::emit_param(s, "pole_guard", 1e-8, "sin(theta) floor for the dphi/dt division");
    if (op.fictitious)
        detail::emit_param(s, "dt_ref", 1e-12, "reference step for the fictitious field [s]");
    s += "\n// corner selection\n";
    {
        char line[160];
        std::snprintf(line, sizeof line, "parameter integer corner_select = %d from [0:%zu];\n",
                      default_index, corner_list.size() - 1);
        s += line;
    }

    s += "\nreal c_coeff;\n";
    s += "real theta, phi, st, ct, sp, cp, mx, my, mz;\n";
    s += "real cos_rel, g_mtj, r_mtj, i_mtj;\n";
    s += "real hx, hy, hz, h_theta, h_phi, s_guard;\n";
    s += "real beta_stt, denom_stt, eps_stt, c_a, c_b, a_theta, a_phi;\n";
    s += "real gamma_p, h_k_coef, dtheta_pre, dtheta_dt, dphi_dt;\n";
    if (op.vcma) s += "real h_vcma_z;\n";
    if (op.fictitious) s += "real sigma_ref, theta_therm;\n";
    if (op.windowing) {
        s += "real theta_therm, theta0p, theta_c, x_w, w_tukey;\n";
        s += "integer poleward;\n";
    }

    s += "\nanalog begin\n";
    s += "    // corner coefficient\n";
    for (std::size_t i = 0; i < corner_list.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof line, "    %sif (corner_select == %zu) c_coeff = %.17g;",
                      i == 0 ? "" : "else ", i, corner_list[i].second);
        s += line;
        s += std::string(" // ") + corner_list[i].first + "\n";
    }
    s += "    else c_coeff = " + detail::fmt_g17(corners.coefficients.at(op.default_corner)) +
         ";\n\n";

    s += "    gamma_p = gamma * mu0 / (1.0 + alpha * alpha);\n";
    s += "    h_k_coef = 2.0 * ki / (t_fl * mu0 * ms);\n";
    if (op.fictitious || op.windowing) {
        s += "    // thermal cone angle: theta_therm = sqrt(1/Delta)\n";
        s += "    if (temperature > 0.0)\n";
        s += "        theta_therm = sqrt(2.0 * kb * temperature / (mu0 * ms * volume\n";
        s += "            * (h_k_coef - ms * (demag_nz - 0.5 * (demag_nx + demag_ny)))));\n";
        s += "    else\n";
        s += "        theta_therm = 0.0;\n";
    }
    if (op.fictitious) {
        s += "    // fictitious thermal field magnitude, frozen at dt_ref\n";
        s += "    if (temperature > 0.0)\n";
        s += "        sigma_ref = sqrt(2.0 * kb * temperature * alpha\n";
        s += "            / (gamma_p * mu0 * ms * volume * dt_ref));\n";
        s += "    else\n";
        s += "        sigma_ref = 0.0;\n";
    }
    if (op.windowing) s += "    theta0p = c_coeff * theta_therm; // window edge theta0'\n";
    s += "\n";

    s += "    // spherical state; phi wraps circularly at 2*pi\n";
    if (op.windowing)
        s += "    theta = idt(dtheta_dt, theta0p, 0, int_abstol);\n";
    else
        s += "    theta = idt(dtheta_dt, theta_therm, 0, int_abstol);\n";
    s += "    phi = idtmod(dphi_dt, phi_init, 2.0 * pi_const, 0.0, int_abstol);\n";
    s += "    st = sin(theta);\n    ct = cos(theta);\n";
    s += "    sp = sin(phi);\n    cp = cos(phi);\n";
    s += "    mx = st * cp;\n    my = st * sp;\n    mz = ct;\n\n";

    s += "    // conduction: cosine TMR interpolation between r_p and r_ap\n";
    s += "    cos_rel = mx * mp_x + my * mp_y + mz * mp_z;\n";
    s += "    g_mtj = 0.5 * ((1.0 + cos_rel) / r_p + (1.0 - cos_rel) / r_ap);\n";
    s += "    r_mtj = 1.0 / g_mtj;\n";
    s += "    i_mtj = V(vp, vn) / r_mtj;\n\n";

    s += "    // effective field [A/m]\n";
    s += "    hx = hx_app - ms * demag_nx * mx;\n";
    s += "    hy = hy_app - ms * demag_ny * my;\n";
    s += "    hz = hz_app + h_k_coef * mz - ms * demag_nz * mz;\n";
    if (op.vcma) {
        s += "    // VCMA: barrier voltage reduces the perpendicular anisotropy\n";
        s += "    h_vcma_z = 2.0 * xi * i_mtj * r_mtj / (t_fl * t_ox * mu0 * ms) * mz;\n";
        s += "    hz = hz - h_vcma_z;\n";
    }
    s += "    h_theta = hx * ct * cp + hy * ct * sp - hz * st;\n";
    s += "    h_phi = -hx * sp + hy * cp;\n";
    if (op.fictitious) {
        s += "    // deterministic thermal surrogate: c_f * sigma(dt_ref) along phi_hat\n";
        s += "    h_phi = h_phi + c_coeff * sigma_ref;\n";
    }
    s += "\n";

    s += "    // Slonczewski spin-transfer torque\n";
    s += "    beta_stt = hbar_c / (mu0 * e_charge) * i_mtj / (volume * ms);\n";
    s += "    denom_stt = (lambda_stt * lambda_stt + 1.0)\n";
    s += "        + (lambda_stt * lambda_stt - 1.0) * cos_rel;\n";
    s += "    eps_stt = p_spin * lambda_stt * lambda_stt / denom_stt;\n";
    s += "    c_a = -(eps_stt + alpha * eps_prime);\n";
    s += "    c_b = eps_prime - alpha * eps_stt;\n";
    s += "    a_theta = mp_x * ct * cp + mp_y * ct * sp - mp_z * st;\n";
    s += "    a_phi = -mp_x * sp + mp_y * cp;\n\n";

    s += "    // spherical s-LLGS rates\n";
    s += "    if (st >= 0.0)\n";
    s += "        s_guard = max(st, pole_guard);\n";
    s += "    else\n";
    s += "        s_guard = min(st, -pole_guard);\n";
    s += "    dtheta_pre = gamma_p * (h_phi + alpha * h_theta)\n";
    s += "        + gamma_p * beta_stt * (c_a * a_theta - c_b * a_phi);\n";
    s += "    dphi_dt = (gamma_p * (alpha * h_phi - h_theta)\n";
    s += "        + gamma_p * beta_stt * (c_a * a_phi + c_b * a_theta)) / s_guard;\n";
    if (op.windowing) {
        s += "\n    // Tukey window: suppress pole-ward theta motion below theta0'\n";
        s += "    theta_c = acos(max(min(ct, 1.0), -1.0));\n";
        s += "    if (theta_c <= 0.5 * pi_const)\n";
        s += "        x_w = theta_c;\n";
        s += "    else\n";
        s += "        x_w = pi_const - theta_c;\n";
        s += "    if (x_w < theta0p)\n";
        s += "        w_tukey = 0.0;\n";
        s += "    else if (x_w - theta0p < 0.25 * theta0p)\n";
        s += "        w_tukey = 0.5 - 0.5 * cos(4.0 * pi_const * (x_w - theta0p) / theta0p);\n";
        s += "    else\n";
        s += "        w_tukey = 1.0;\n";
        s += "    poleward = ct * st * dtheta_pre < 0.0;\n";
        s += "    if (poleward)\n";
        s += "        dtheta_dt = w_tukey * dtheta_pre;\n";
        s += "    else\n";
        s += "        dtheta_dt = dtheta_pre;\n";
    } else {
        s += "    dtheta_dt = dtheta_pre;\n";
    }
    s += "\n    // electrical contribution\n";
    s += "    I(vp, vn) <+ V(vp, vn) / r_mtj;\n";
    s += "end\n\nendmodule\n";
    return s;
}

// ---------------------------------------------------------------------------
// Structural checks on emitted text. The model is never executed here; these
// lints plus the parameter round-trip are the correctness contract.
// ---------------------------------------------------------------------------

/// Parse `parameter real|integer name = value` lines.
inline std::map<std::string, double> parse_parameters(const std::string& text) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t p = line.find_first_not_of(" \t");
        if (p == std::string::npos || line.compare(p, 10, "parameter ") != 0) continue;
        p += 10;
        p = line.find_first_not_of(" \t", p);
        if (line.compare(p, 5, "real ") == 0)
            p += 5;
        else if (line.compare(p, 8, "integer ") == 0)
            p += 8;
        else
            continue;
        p = line.find_first_not_of(" \t", p);
        std::size_t name_end = p;
        while (name_end < line.size() &&
               (std::isalnum(static_cast<unsigned char>(line[name_end])) || line[name_end] == '_'))
            ++name_end;
        const std::string name = line.substr(p, name_end - p);
        std::size_t eq = line.find('=', name_end);
        if (eq == std::string::npos || name.empty()) continue;
        out[name] = std::strtod(line.c_str() + eq + 1, nullptr);
    }
    return out;
}

namespace detail {

/// Identifier scan that never splits numeric literals (1.0e-09 has no
/// identifier in it). Returns each identifier in `text` in order.
inline std::vector<std::string> lex_identifiers(const std::string& text) {
    std::vector<std::string> ids;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (text.compare(i, 2, "//") == 0) { // comment: skip to end of line
            while (i < n && text[i] != '\n') ++i;
        } else if (c == '"') { // string literal
            ++i;
            while (i < n && text[i] != '"') ++i;
            ++i;
        } else if (std::isdigit(c)) { // numeric literal, incl. exponent
            ++i;
            while (i < n) {
                const unsigned char d = static_cast<unsigned char>(text[i]);
                if (std::isdigit(d) || d == '.') {
                    ++i;
                } else if ((d == 'e' || d == 'E') && i + 1 < n &&
                           (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                            ((text[i + 1] == '+' || text[i + 1] == '-') && i + 2 < n &&
                             std::isdigit(static_cast<unsigned char>(text[i + 2]))))) {
                    i += 2;
                } else {
                    break;
                }
            }
        } else if (std::isalpha(c) || c == '_' || c == '`') {
            const std::size_t start = i;
            ++i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                             text[i] == '_'))
                ++i;
            ids.push_back(text.substr(start, i - start));
        } else {
            ++i;
        }
    }
    return ids;
}

inline const std::set<std::string>& verilog_keywords() {
    static const std::set<std::string> kw = {
        "module", "endmodule", "inout", "input", "output", "electrical", "parameter", "real",
        "integer", "analog", "begin", "end", "if", "else", "from", "exclude", "inf",
        "`include", "disciplines", "vams"};
    return kw;
}

inline const std::set<std::string>& verilog_builtins() {
    static const std::set<std::string> fn = {"sin",  "cos",  "tan", "asin", "acos", "atan",
                                             "atan2", "sqrt", "abs", "pow",  "exp",  "ln",
                                             "log",  "min",  "max", "idt",  "idtmod", "V", "I"};
    return fn;
}

} // namespace detail

/// Every identifier used in the text must be declared in it (port, net,
/// parameter, or variable) or be a language builtin. Returns the offenders.
inline std::vector<std::string> lint_undeclared_symbols(const std::string& text) {
    std::set<std::string> declared;
    // Declaration lines: parameter ... name =, real/integer lists, module ports,
    // electrical nets. A light state machine over the identifier stream.
    const auto ids = detail::lex_identifiers(text);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == "parameter" && i + 2 < ids.size()) {
            declared.insert(ids[i + 2]); // parameter <type> <name>
        } else if (ids[i] == "module" && i + 1 < ids.size()) {
            declared.insert(ids[i + 1]);
        }
    }
    // real/integer declaration statements appear between the port section and
    // `analog begin`; scan line-wise so expression-local uses don't count.
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t p = line.find_first_not_of(" \t");
        if (p == std::string::npos) continue;
        bool decl = false;
        if (line.compare(p, 5, "real ") == 0 || line.compare(p, 8, "integer ") == 0 ||
            line.compare(p, 11, "electrical ") == 0 || line.compare(p, 6, "inout ") == 0)
            decl = true;
        if (line.compare(p, 10, "parameter ") == 0) continue; // handled above
        if (!decl) continue;
        for (const auto& id : detail::lex_identifiers(line.substr(p)))
            declared.insert(id);
    }
    std::vector<std::string> undeclared;
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (id[0] == '`') continue;
        if (detail::verilog_keywords().count(id) || detail::verilog_builtins().count(id)) continue;
        if (declared.count(id) || seen.count(id)) continue;
        seen.insert(id);
        undeclared.push_back(id);
    }
    return undeclared;
}

/// Exactly one circular-integration construct (idtmod), and it must
/// integrate phi; theta must use plain tolerance-parameterized idt.
inline std::vector<std::string> lint_integration(const std::string& text) {
    std::vector<std::string> problems;
    int n_idtmod = 0;
    bool idtmod_on_phi = false, theta_plain_idt = false;
    std::size_t pos = 0;
    while ((pos = text.find("idtmod(", pos)) != std::string::npos) {
        ++n_idtmod;
        std::size_t ls = text.rfind('\n', pos);
        ls = ls == std::string::npos ? 0 : ls + 1;
        const std::string line = text.substr(ls, text.find('\n', pos) - ls);
        if (line.find("phi") != std::string::npos && line.find("theta") == std::string::npos)
            idtmod_on_phi = true;
        pos += 7;
    }
    if (n_idtmod != 1)
        problems.push_back("expected exactly one idtmod, found " + std::to_string(n_idtmod));
    else if (!idtmod_on_phi)
        problems.push_back("the idtmod construct does not integrate phi");
    pos = 0;
    while ((pos = text.find("theta = idt(", pos)) != std::string::npos) {
        theta_plain_idt = true;
        pos += 1;
    }
    if (!theta_plain_idt) problems.push_back("theta is not integrated with a plain idt");
    return problems;
}

/// The emitter must not pin the solver timestep (no fixed-step constructs).
inline std::vector<std::string> lint_no_fixed_step(const std::string& text) {
    std::vector<std::string> problems;
    for (const char* bad : {"$bound_step", "timer(", "absdelay("})
        if (text.find(bad) != std::string::npos)
            problems.push_back(std::string("fixed-timestep construct present: ") + bad);
    return problems;
}

/// All structural lints; empty result = clean.
inline std::vector<std::string> lint_model(const std::string& text) {
    std::vector<std::string> all = lint_undeclared_symbols(text);
    for (auto& p : lint_integration(text)) all.push_back(p);
    for (auto& p : lint_no_fixed_step(text)) all.push_back(p);
    return all;
}

} // namespace macrospin
