#include "yns/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace yns {

using nlohmann::json;

const std::vector<std::string> kExperimentNames = {"spectrum", "theta",       "simulate", "besov",
                                                   "decay-fit", "instability", "escape"};

namespace {

std::string join_messages(const std::vector<ConfigViolation>& v) {
    std::string out = "invalid config:";
    for (const auto& x : v) out += " [" + (x.pointer.empty() ? "/" : x.pointer) + "] " + x.message + ";";
    return out;
}

class Reader {
public:
    std::vector<ConfigViolation> violations;

    void fail(const std::string& ptr, const std::string& msg) { violations.push_back({ptr, msg}); }

    // Returns nullptr (after recording a violation if required) when absent or not an object.
    const json* object(const json& parent, const std::string& key, const std::string& ptr,
                       bool required) {
        const std::string here = ptr + "/" + key;
        if (!parent.contains(key)) {
            if (required) fail(here, "missing required object");
            return nullptr;
        }
        if (!parent.at(key).is_object()) {
            fail(here, "expected an object");
            return nullptr;
        }
        return &parent.at(key);
    }

    void allow(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, _] : obj.items())
            if (!ok.count(k)) fail(ptr + "/" + k, "unknown field");
    }

    double number(const json& obj, const std::string& key, const std::string& ptr, double def,
                  bool required = false) {
        if (!obj.contains(key)) {
            if (required) fail(ptr + "/" + key, "missing required number");
            return def;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(ptr + "/" + key, "expected a number");
            return def;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(ptr + "/" + key, "must be finite");
        return x;
    }

    int integer(const json& obj, const std::string& key, const std::string& ptr, int def) {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(ptr + "/" + key, "expected an integer");
            return def;
        }
        return v.get<int>();
    }

    bool boolean(const json& obj, const std::string& key, const std::string& ptr, bool def) {
        if (!obj.contains(key)) return def;
        if (!obj.at(key).is_boolean()) {
            fail(ptr + "/" + key, "expected a boolean");
            return def;
        }
        return obj.at(key).get<bool>();
    }

    std::string string(const json& obj, const std::string& key, const std::string& ptr,
                       const std::string& def, bool required = false) {
        if (!obj.contains(key)) {
            if (required) fail(ptr + "/" + key, "missing required string");
            return def;
        }
        if (!obj.at(key).is_string()) {
            fail(ptr + "/" + key, "expected a string");
            return def;
        }
        return obj.at(key).get<std::string>();
    }

    template <class F>
    void guard(const std::string& ptr, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            fail(ptr, e.what());
        }
    }
};

PhysicalParams read_params(Reader& r, const json& doc) {
    PhysicalParams p;
    const json* o = r.object(doc, "params", "", true);
    if (!o) return p;
    r.allow(*o, "/params", {"rho_bar", "mu", "mu_prime", "gamma", "pressure"});
    p.rho_bar = r.number(*o, "rho_bar", "/params", 1.0, true);
    p.mu = r.number(*o, "mu", "/params", 1.0, true);
    p.mu_prime = r.number(*o, "mu_prime", "/params", 0.0);
    p.gamma = r.number(*o, "gamma", "/params", 0.0, true);
    if (const json* law = r.object(*o, "pressure", "/params", true)) {
        const std::string kind = r.string(*law, "law", "/params/pressure", "gamma", true);
        if (kind == "gamma") {
            r.allow(*law, "/params/pressure", {"law", "A", "g"});
            p.pressure = GammaLaw{r.number(*law, "A", "/params/pressure", 1.0, true),
                                  r.number(*law, "g", "/params/pressure", 1.4, true)};
        } else if (kind == "slope") {
            r.allow(*law, "/params/pressure", {"law", "p_prime"});
            p.pressure = DirectSlope{r.number(*law, "p_prime", "/params/pressure", 1.0, true)};
        } else {
            r.fail("/params/pressure/law", "expected \"gamma\" or \"slope\"");
        }
    }
    // Field-level paths for the hypotheses the model checks.
    if (p.mu <= 0.0) r.fail("/params/mu", "viscosity hypothesis μ>0 violated (mu=" + std::to_string(p.mu) + ")");
    else if (2 * p.mu + p.mu_prime <= 0.0)
        r.fail("/params/mu_prime", "viscosity hypothesis 2μ+μ'>0 violated");
    if (p.rho_bar <= 0.0) r.fail("/params/rho_bar", "density hypothesis rho_bar>0 violated");
    if (p.mu > 0.0 && p.rho_bar > 0.0 && 2 * p.mu + p.mu_prime > 0.0)
        r.guard("/params/pressure", [&] { validate(p); });
    return p;
}

GridSpec read_grid(Reader& r, const json& doc) {
    GridSpec g;
    if (const json* o = r.object(doc, "grid", "", false)) {
        r.allow(*o, "/grid", {"dim", "n", "length"});
        g.dim = r.integer(*o, "dim", "/grid", g.dim);
        g.n = r.integer(*o, "n", "/grid", g.n);
        g.length = r.number(*o, "length", "/grid", g.length);
    }
    r.guard("/grid", [&] { g.validate(); });
    return g;
}

SolverConfig read_solver(Reader& r, const json& doc) {
    SolverConfig s;
    if (const json* o = r.object(doc, "solver", "", false)) {
        const std::string p = "/solver";
        r.allow(*o, p, {"dt", "t_end", "scheme", "dealias", "snapshot_every", "norm_every",
                        "vacuum_margin", "lp_p", "energy", "energy_j0", "cfl", "stop_at_rho_l2"});
        s.dt = r.number(*o, "dt", p, s.dt);
        s.t_end = r.number(*o, "t_end", p, s.t_end);
        r.guard(p + "/scheme", [&] { s.scheme = scheme_from_string(r.string(*o, "scheme", p, "etd-rk2")); });
        s.dealias = r.boolean(*o, "dealias", p, s.dealias);
        s.snapshot_every = r.integer(*o, "snapshot_every", p, s.snapshot_every);
        s.norm_every = r.integer(*o, "norm_every", p, s.norm_every);
        s.vacuum_margin = r.number(*o, "vacuum_margin", p, s.vacuum_margin);
        s.lp_p = r.number(*o, "lp_p", p, s.lp_p);
        s.energy = r.boolean(*o, "energy", p, s.energy);
        s.energy_j0 = r.integer(*o, "energy_j0", p, s.energy_j0);
        s.cfl = r.number(*o, "cfl", p, s.cfl);
        if (o->contains("stop_at_rho_l2")) s.stop_at_rho_l2 = r.number(*o, "stop_at_rho_l2", p, 0.0);
    }
    r.guard("/solver", [&] { s.validate(); });
    return s;
}

InitialData read_initial(Reader& r, const json& parent, const std::string& ptr) {
    InitialData d;
    const json* o = r.object(parent, "initial", ptr, false);
    if (!o) return d;
    const std::string p = ptr + "/initial";
    r.allow(*o, p, {"kind", "amplitude", "theta_bar", "zeta_bar", "k_cut", "sigma", "path"});
    d.kind = r.string(*o, "kind", p, d.kind);
    static const std::set<std::string> kinds = {"unstable", "random", "decay", "snapshot", "zero"};
    if (!kinds.count(d.kind)) r.fail(p + "/kind", "expected unstable, random, decay, snapshot or zero");
    d.amplitude = r.number(*o, "amplitude", p, d.amplitude);
    if (!(d.amplitude > 0.0)) r.fail(p + "/amplitude", "must be > 0");
    d.theta_bar = r.number(*o, "theta_bar", p, d.theta_bar);
    if (o->contains("zeta_bar")) d.zeta_bar = r.number(*o, "zeta_bar", p, 0.0);
    d.k_cut = r.number(*o, "k_cut", p, d.k_cut);
    d.sigma = r.number(*o, "sigma", p, d.sigma);
    d.path = r.string(*o, "path", p, d.path, d.kind == "snapshot");
    return d;
}

ExperimentBlock read_block(Reader& r, const std::string& name, const json& o) {
    const std::string p = "/" + name;
    if (name == "spectrum") {
        SpectrumBlock b;
        r.allow(o, p, {"k_min", "k_max", "n", "spacing"});
        b.k_min = r.number(o, "k_min", p, b.k_min);
        b.k_max = r.number(o, "k_max", p, b.k_max);
        b.n = r.integer(o, "n", p, b.n);
        const std::string spacing = r.string(o, "spacing", p, "log");
        if (spacing != "log" && spacing != "linear") r.fail(p + "/spacing", "expected \"log\" or \"linear\"");
        b.log_spacing = spacing == "log";
        if (!(b.k_min >= 0.0) || !(b.k_max > b.k_min)) r.fail(p, "need 0 <= k_min < k_max");
        if (b.log_spacing && !(b.k_min > 0.0)) r.fail(p + "/k_min", "log spacing needs k_min > 0");
        if (b.n < 2) r.fail(p + "/n", "must be >= 2");
        return b;
    }
    if (name == "theta") {
        ThetaBlock b;
        r.allow(o, p, {"k_min", "k_max", "n"});
        b.scan.k_min = r.number(o, "k_min", p, b.scan.k_min);
        b.scan.k_max = r.number(o, "k_max", p, b.scan.k_max);
        b.scan.n_log_samples = r.integer(o, "n", p, b.scan.n_log_samples);
        if (!(b.scan.k_min > 0.0) || !(b.scan.k_max > b.scan.k_min) || b.scan.n_log_samples < 2)
            r.fail(p, "scan grid is degenerate: need 0 < k_min < k_max and n >= 2");
        return b;
    }
    if (name == "simulate") {
        SimulateBlock b;
        r.allow(o, p, {"initial"});
        b.initial = read_initial(r, o, p);
        return b;
    }
    if (name == "besov") {
        BesovBlockSpec b;
        r.allow(o, p, {"snapshot", "field", "s", "p", "r", "j0"});
        b.snapshot = r.string(o, "snapshot", p, "", true);
        b.field = r.string(o, "field", p, b.field);
        if (b.field != "rho" && b.field != "u") r.fail(p + "/field", "expected \"rho\" or \"u\"");
        b.s = r.number(o, "s", p, b.s);
        b.p = r.number(o, "p", p, b.p);
        if (!(b.p >= 1.0)) r.fail(p + "/p", "must be >= 1");
        if (o.contains("r") && o.at("r").is_string()) {
            if (o.at("r") != "inf") r.fail(p + "/r", "expected 1 or \"inf\"");
            b.r = std::numeric_limits<double>::infinity();
        } else {
            b.r = r.number(o, "r", p, 1.0);
            if (b.r != 1.0) r.fail(p + "/r", "expected 1 or \"inf\"");
        }
        b.j0 = r.integer(o, "j0", p, b.j0);
        return b;
    }
    if (name == "decay-fit") {
        DecayFitBlock b;
        r.allow(o, p, {"dim", "p", "sigma", "sigma1", "t_min", "t_max", "n_times", "fit_lo", "fit_hi",
                       "heat_surrogate", "rel_tol", "refinement", "source", "initial"});
        DecaySpec& d = b.spec;
        d.dim = r.integer(o, "dim", p, d.dim);
        d.p = r.number(o, "p", p, d.p);
        d.sigma = r.number(o, "sigma", p, d.sigma);
        d.sigma1 = r.number(o, "sigma1", p, d.sigma1);
        d.t_min = r.number(o, "t_min", p, d.t_min);
        d.t_max = r.number(o, "t_max", p, d.t_max);
        d.n_times = r.integer(o, "n_times", p, d.n_times);
        d.fit_lo = r.number(o, "fit_lo", p, d.t_min);
        d.fit_hi = r.number(o, "fit_hi", p, d.t_max);
        d.heat_surrogate = r.boolean(o, "heat_surrogate", p, d.heat_surrogate);
        d.rel_tol = r.number(o, "rel_tol", p, d.rel_tol);
        d.refinement = r.integer(o, "refinement", p, d.refinement);
        b.source = r.string(o, "source", p, b.source);
        if (b.source != "quadrature" && b.source != "run")
            r.fail(p + "/source", "expected \"quadrature\" or \"run\"");
        b.initial = read_initial(r, o, p);
        if (!o.contains("initial")) {
            b.initial.kind = "decay";
            b.initial.sigma = d.sigma;
        }
        r.guard(p, [&] { d.validate(); });
        return b;
    }
    if (name == "instability") {
        InstabilityBlock b;
        r.allow(o, p, {"theta_bar", "zeta_bar", "amplitude", "min_shells", "t_end", "sample_dt",
                       "check_narrowing"});
        InstabilitySpec& s = b.spec;
        s.data.theta_bar = r.number(o, "theta_bar", p, 0.0);
        if (o.contains("zeta_bar")) s.data.zeta_bar = r.number(o, "zeta_bar", p, 0.0);
        s.data.amplitude = r.number(o, "amplitude", p, s.data.amplitude);
        s.data.min_shells = r.integer(o, "min_shells", p, s.data.min_shells);
        s.t_end = r.number(o, "t_end", p, s.t_end);
        s.sample_dt = r.number(o, "sample_dt", p, s.sample_dt);
        s.check_narrowing = r.boolean(o, "check_narrowing", p, s.check_narrowing);
        if (s.data.theta_bar < 0.0) r.fail(p + "/theta_bar", "must be >= 0 (0 selects Theta/2)");
        if (!(s.data.amplitude > 0.0)) r.fail(p + "/amplitude", "must be > 0");
        if (!(s.t_end > 0.0)) r.fail(p + "/t_end", "must be > 0");
        if (!(s.sample_dt > 0.0)) r.fail(p + "/sample_dt", "must be > 0");
        return b;
    }
    EscapeBlock b;
    r.allow(o, p, {"epsilon0", "deltas", "theta_bar", "zeta_bar", "t_cap", "dt"});
    EscapeSpec& s = b.spec;
    s.epsilon0 = r.number(o, "epsilon0", p, s.epsilon0);
    if (o.contains("deltas")) {
        if (!o.at("deltas").is_array()) {
            r.fail(p + "/deltas", "expected an array of numbers");
        } else {
            s.deltas.clear();
            for (std::size_t i = 0; i < o.at("deltas").size(); ++i) {
                const json& v = o.at("deltas")[i];
                if (!v.is_number()) r.fail(p + "/deltas/" + std::to_string(i), "expected a number");
                else s.deltas.push_back(v.get<double>());
            }
        }
    }
    s.theta_bar = r.number(o, "theta_bar", p, s.theta_bar);
    if (o.contains("zeta_bar")) s.zeta_bar = r.number(o, "zeta_bar", p, 0.0);
    s.t_cap = r.number(o, "t_cap", p, s.t_cap);
    s.dt = r.number(o, "dt", p, s.dt);
    r.guard(p, [&] { s.validate(); });
    return b;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> v)
    : ValidationError(join_messages(v)), violations_(std::move(v)) {}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::vector<ConfigViolation>{{"", std::string("malformed JSON: ") + e.what()}});
    }
    return parse_config(doc);
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError(std::vector<ConfigViolation>{{"", "config must be a JSON object"}});
    Reader r;
    RunConfig cfg;
    cfg.document = doc;

    std::vector<std::string> present;
    for (const auto& name : kExperimentNames)
        if (doc.contains(name)) present.push_back(name);
    for (const auto& [k, _] : doc.items()) {
        const bool known = k == "params" || k == "grid" || k == "solver" || k == "output" ||
                           k == "seed" ||
                           std::find(kExperimentNames.begin(), kExperimentNames.end(), k) !=
                               kExperimentNames.end();
        if (!known) r.fail("/" + k, "unknown top-level field");
    }
    if (present.size() != 1) {
        std::string names;
        for (const auto& n : present) names += (names.empty() ? "" : ", ") + n;
        r.fail("", "exactly one experiment block is required (found " +
                       std::to_string(present.size()) + (names.empty() ? "" : ": " + names) + ")");
    }

    cfg.params = read_params(r, doc);
    cfg.grid = read_grid(r, doc);
    cfg.solver = read_solver(r, doc);
    if (const json* o = r.object(doc, "output", "", false)) {
        r.allow(*o, "/output", {"dir"});
        cfg.output_dir = r.string(*o, "dir", "/output", cfg.output_dir);
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) r.fail("/seed", "expected a non-negative integer");
        else cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    for (const auto& name : present) {
        if (!doc.at(name).is_object()) {
            r.fail("/" + name, "expected an object");
            continue;
        }
        cfg.block = read_block(r, name, doc.at(name));
        cfg.experiment = name;
    }
    if (!r.violations.empty()) throw ConfigError(std::move(r.violations));
    return cfg;
}

}  // namespace yns
