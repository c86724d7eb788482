#include "cardio/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cardio {

MorrisLecarParams SimConfig::params() const {
    MorrisLecarParams p;
    p.v1 = v1;
    p.v2 = v2;
    p.v3 = v3;
    p.v4 = v4;
    p.v_ca = v_ca;
    p.v_k = v_k;
    p.v_l = v_l;
    p.g_ca = g_ca;
    p.g_k = g_k;
    p.g_l = g_l;
    p.phi = phi;
    p.c_m = c_m;
    p.sign_convention = sign_convention;
    return p;
}

ConductivityField SimConfig::field() const {
    ConductivityField f;
    f.sigma_l = sigma_l;
    f.sigma_t = sigma_t;
    f.lambda_ratio = lambda;
    const double angle = fiber_angle;
    if (angle != 0.0) f.fiber_angle = [angle](Vec2) { return angle; };
    return f;
}

StepOptions SimConfig::step_options() const {
    StepOptions o;
    o.mass_lumping = mass_lumping;
    o.solver_tol = solver_tol;
    o.solver_max_iter = solver_max_iter;
    o.divergence_guard = divergence_guard;
    o.check_gate_bounds = gate_bound_check;
    return o;
}

void SimConfig::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    auto require = [](bool ok, const std::string& message) {
        if (!ok) throw ConfigError(message);
    };
    require(finite(domain_a) && finite(domain_b) && domain_a < domain_b,
            "config: requires domain_a < domain_b and finite bounds");
    require(grid_n >= 1, "config: grid_n must be >= 1");
    require(finite(dt) && dt > 0.0, "config: dt must be positive");
    require(n_steps >= 0, "config: n_steps must be >= 0");
    require(finite(epsilon) && epsilon >= 0.0, "config: epsilon must be >= 0");
    require(v2 > 0.0, "config: v2 must be positive");
    require(v4 > 0.0, "config: v4 must be positive");
    require(g_ca >= 0.0 && g_k >= 0.0 && g_l >= 0.0,
            "config: conductances g_ca/g_k/g_l must be >= 0");
    require(finite(phi) && phi >= 0.0, "config: phi must be >= 0");
    require(c_m > 0.0, "config: c_m must be positive");
    require(finite(sigma_l) && finite(sigma_t) && sigma_l >= 0.0 && sigma_t >= 0.0,
            "config: sigma_l/sigma_t must be >= 0");
    require((sigma_l == 0.0) == (sigma_t == 0.0),
            "config: sigma_l and sigma_t must be both zero or both positive");
    require(lambda > 0.0, "config: lambda must be positive");
    require(finite(fiber_angle), "config: fiber_angle must be finite");
    require(solver_tol > 0.0, "config: solver_tol must be positive");
    require(!(mass_lumping && model == ModelKind::bidomain),
            "config: mass_lumping applies to the monodomain model only");
    require(solver_max_iter >= 0, "config: solver_max_iter must be >= 0");
    require(divergence_guard > 0.0, "config: divergence_guard must be positive");
    for (double x : {ic.v0, ic.base, ic.amplitude, ic.center.x, ic.center.y, ic.ramp_lo,
                     ic.ramp_hi, ic.q1, ic.q2, ic.q3, ic.q4}) {
        require(finite(x), "config: initial-condition values must be finite");
    }
    require(ic.smooth_width >= 0.0, "config: ic_smooth_width must be >= 0");
    require(ic.width > 0.0, "config: ic_width must be positive");
    require(ic.w0 >= 0.0 && ic.w0 <= 1.0, "config: ic_w0 must lie in [0, 1]");
    require(ic.w_floor > 0.0 && ic.w_floor <= 1.0, "config: ic_w_floor must lie in (0, 1]");
    for (int s : snapshot_steps) {
        require(s >= 0 && s <= n_steps,
                "config: snapshot_steps entry " + std::to_string(s) +
                    " outside [0, n_steps]");
    }
    for (const Vec2& p : probes) {
        require(p.x >= domain_a && p.x <= domain_b && p.y >= domain_a && p.y <= domain_b,
                "config: probes entry (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                    ") outside the domain");
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& value, const std::string& key, int line_no) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' expects a number, got '" + value + "'");
    }
    if (used != value.size()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' has trailing characters in '" + value + "'");
    }
    return x;
}

int parse_int(const std::string& value, const std::string& key, int line_no) {
    const double x = parse_double(value, key, line_no);
    const int i = static_cast<int>(std::llround(x));
    if (static_cast<double>(i) != x) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' expects an integer, got '" + value + "'");
    }
    return i;
}

bool parse_bool(const std::string& value, const std::string& key, int line_no) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                      "' expects true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key, int line_no) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        out.push_back(parse_int(cell, key, line_no));
    }
    return out;
}

std::vector<Vec2> parse_points(const std::string& value, const std::string& key, int line_no) {
    // "(x,y) (x,y) ..." with optional separators between pairs
    std::vector<Vec2> out;
    std::size_t pos = 0;
    while (pos < value.size()) {
        while (pos < value.size() && value[pos] != '(') ++pos;
        if (pos >= value.size()) break;
        const std::size_t close = value.find(')', pos);
        if (close == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                              "' has an unterminated point");
        }
        const std::string pair = value.substr(pos + 1, close - pos - 1);
        const std::size_t comma = pair.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                              "' expects (x,y) pairs");
        }
        Vec2 p;
        p.x = parse_double(trim(pair.substr(0, comma)), key, line_no);
        p.y = parse_double(trim(pair.substr(comma + 1)), key, line_no);
        out.push_back(p);
        pos = close + 1;
    }
    if (out.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' expects at least one (x,y) pair");
    }
    return out;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    using Setter = std::function<void(SimConfig&, const std::string&, int)>;
    static const std::map<std::string, Setter> setters = {
        {"domain_a", [](SimConfig& c, const std::string& v, int l) { c.domain_a = parse_double(v, "domain_a", l); }},
        {"domain_b", [](SimConfig& c, const std::string& v, int l) { c.domain_b = parse_double(v, "domain_b", l); }},
        {"grid_n", [](SimConfig& c, const std::string& v, int l) { c.grid_n = parse_int(v, "grid_n", l); }},
        {"dt", [](SimConfig& c, const std::string& v, int l) { c.dt = parse_double(v, "dt", l); }},
        {"n_steps", [](SimConfig& c, const std::string& v, int l) { c.n_steps = parse_int(v, "n_steps", l); }},
        {"model",
         [](SimConfig& c, const std::string& v, int l) {
             if (v == "monodomain") c.model = ModelKind::monodomain;
             else if (v == "bidomain") c.model = ModelKind::bidomain;
             else throw ConfigError("config line " + std::to_string(l) +
                                    ": model must be monodomain or bidomain, got '" + v + "'");
         }},
        {"epsilon", [](SimConfig& c, const std::string& v, int l) { c.epsilon = parse_double(v, "epsilon", l); }},
        {"v1", [](SimConfig& c, const std::string& v, int l) { c.v1 = parse_double(v, "v1", l); }},
        {"v2", [](SimConfig& c, const std::string& v, int l) { c.v2 = parse_double(v, "v2", l); }},
        {"v3", [](SimConfig& c, const std::string& v, int l) { c.v3 = parse_double(v, "v3", l); }},
        {"v4", [](SimConfig& c, const std::string& v, int l) { c.v4 = parse_double(v, "v4", l); }},
        {"v_ca", [](SimConfig& c, const std::string& v, int l) { c.v_ca = parse_double(v, "v_ca", l); }},
        {"v_k", [](SimConfig& c, const std::string& v, int l) { c.v_k = parse_double(v, "v_k", l); }},
        {"v_l", [](SimConfig& c, const std::string& v, int l) { c.v_l = parse_double(v, "v_l", l); }},
        {"g_ca", [](SimConfig& c, const std::string& v, int l) { c.g_ca = parse_double(v, "g_ca", l); }},
        {"g_k", [](SimConfig& c, const std::string& v, int l) { c.g_k = parse_double(v, "g_k", l); }},
        {"g_l", [](SimConfig& c, const std::string& v, int l) { c.g_l = parse_double(v, "g_l", l); }},
        {"phi", [](SimConfig& c, const std::string& v, int l) { c.phi = parse_double(v, "phi", l); }},
        {"c_m", [](SimConfig& c, const std::string& v, int l) { c.c_m = parse_double(v, "c_m", l); }},
        {"sign_convention",
         [](SimConfig& c, const std::string& v, int l) {
             if (v == "paper") c.sign_convention = SignConvention::paper;
             else if (v == "standard") c.sign_convention = SignConvention::standard;
             else throw ConfigError("config line " + std::to_string(l) +
                                    ": sign_convention must be paper or standard");
         }},
        {"sigma_l", [](SimConfig& c, const std::string& v, int l) { c.sigma_l = parse_double(v, "sigma_l", l); }},
        {"sigma_t", [](SimConfig& c, const std::string& v, int l) { c.sigma_t = parse_double(v, "sigma_t", l); }},
        {"lambda", [](SimConfig& c, const std::string& v, int l) { c.lambda = parse_double(v, "lambda", l); }},
        {"fiber_angle", [](SimConfig& c, const std::string& v, int l) { c.fiber_angle = parse_double(v, "fiber_angle", l); }},
        {"ic_preset",
         [](SimConfig& c, const std::string& v, int l) {
             if (v == "constant") c.ic.kind = InitialCondition::Kind::constant;
             else if (v == "gaussian") c.ic.kind = InitialCondition::Kind::gaussian_bump;
             else if (v == "ramp") c.ic.kind = InitialCondition::Kind::linear_ramp;
             else if (v == "quadrants") c.ic.kind = InitialCondition::Kind::quadrants;
             else throw ConfigError("config line " + std::to_string(l) +
                                    ": ic_preset must be constant|gaussian|ramp|quadrants");
         }},
        {"ic_v0", [](SimConfig& c, const std::string& v, int l) { c.ic.v0 = parse_double(v, "ic_v0", l); }},
        {"ic_base", [](SimConfig& c, const std::string& v, int l) { c.ic.base = parse_double(v, "ic_base", l); }},
        {"ic_amplitude", [](SimConfig& c, const std::string& v, int l) { c.ic.amplitude = parse_double(v, "ic_amplitude", l); }},
        {"ic_width", [](SimConfig& c, const std::string& v, int l) { c.ic.width = parse_double(v, "ic_width", l); }},
        {"ic_center_x", [](SimConfig& c, const std::string& v, int l) { c.ic.center.x = parse_double(v, "ic_center_x", l); }},
        {"ic_center_y", [](SimConfig& c, const std::string& v, int l) { c.ic.center.y = parse_double(v, "ic_center_y", l); }},
        {"ic_ramp_lo", [](SimConfig& c, const std::string& v, int l) { c.ic.ramp_lo = parse_double(v, "ic_ramp_lo", l); }},
        {"ic_ramp_hi", [](SimConfig& c, const std::string& v, int l) { c.ic.ramp_hi = parse_double(v, "ic_ramp_hi", l); }},
        {"ic_q1", [](SimConfig& c, const std::string& v, int l) { c.ic.q1 = parse_double(v, "ic_q1", l); }},
        {"ic_q2", [](SimConfig& c, const std::string& v, int l) { c.ic.q2 = parse_double(v, "ic_q2", l); }},
        {"ic_q3", [](SimConfig& c, const std::string& v, int l) { c.ic.q3 = parse_double(v, "ic_q3", l); }},
        {"ic_q4", [](SimConfig& c, const std::string& v, int l) { c.ic.q4 = parse_double(v, "ic_q4", l); }},
        {"ic_smooth_width", [](SimConfig& c, const std::string& v, int l) { c.ic.smooth_width = parse_double(v, "ic_smooth_width", l); }},
        {"ic_w_mode",
         [](SimConfig& c, const std::string& v, int l) {
             if (v == "constant") c.ic.gate = InitialCondition::GateInit::constant;
             else if (v == "equilibrium") c.ic.gate = InitialCondition::GateInit::equilibrium;
             else throw ConfigError("config line " + std::to_string(l) +
                                    ": ic_w_mode must be constant or equilibrium");
         }},
        {"ic_w0", [](SimConfig& c, const std::string& v, int l) { c.ic.w0 = parse_double(v, "ic_w0", l); }},
        {"ic_w_floor", [](SimConfig& c, const std::string& v, int l) { c.ic.w_floor = parse_double(v, "ic_w_floor", l); }},
        {"probes", [](SimConfig& c, const std::string& v, int l) { c.probes = parse_points(v, "probes", l); }},
        {"snapshot_steps", [](SimConfig& c, const std::string& v, int l) { c.snapshot_steps = parse_int_list(v, "snapshot_steps", l); }},
        {"solver_tol", [](SimConfig& c, const std::string& v, int l) { c.solver_tol = parse_double(v, "solver_tol", l); }},
        {"solver_max_iter", [](SimConfig& c, const std::string& v, int l) { c.solver_max_iter = parse_int(v, "solver_max_iter", l); }},
        {"mass_lumping", [](SimConfig& c, const std::string& v, int l) { c.mass_lumping = parse_bool(v, "mass_lumping", l); }},
        {"gate_bound_check", [](SimConfig& c, const std::string& v, int l) { c.gate_bound_check = parse_bool(v, "gate_bound_check", l); }},
        {"divergence_guard", [](SimConfig& c, const std::string& v, int l) { c.divergence_guard = parse_double(v, "divergence_guard", l); }},
        {"output_dir", [](SimConfig& c, const std::string& v, int) { c.output_dir = v; }},
    };

    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
        it->second(cfg, value, line_no);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace cardio
