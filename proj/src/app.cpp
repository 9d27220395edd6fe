#include "yns/app.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "yns/io.hpp"
#include "yns/lp_besov.hpp"

namespace yns {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Collects artifacts so the manifest can list their hashes.
class Artifacts {
public:
    Artifacts(fs::path dir, bool verbose) : dir_(std::move(dir)), verbose_(verbose) {
        fs::create_directories(dir_);
    }

    const fs::path& dir() const { return dir_; }

    void text(const std::string& name, const std::string& body) {
        write_text(dir_ / name, body);
        hashes_[name] = sha256_hex(body);
        if (verbose_) std::cerr << "wrote " << (dir_ / name).string() << "\n";
    }
    void json_doc(const std::string& name, const json& doc) { text(name, doc.dump(2) + "\n"); }
    void file(const std::string& name) { hashes_[name] = sha256_file(dir_ / name); }

    json hashes() const { return json(hashes_); }

private:
    fs::path dir_;
    bool verbose_;
    std::map<std::string, std::string> hashes_;
};

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", kind}, {"message", message}, {"aborted", true}};
}

json coeffs_json(const Coefficients& c) {
    return {{"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"alpha3", c.alpha3},
            {"alpha4", c.alpha4}, {"eta", c.eta},       {"stability_margin", c.stability_margin},
            {"gamma", c.gamma},   {"rho_bar", c.rho_bar}, {"regime", to_string(classify_regime(c))}};
}

std::string fmt(double x) { return format_double(x); }

json summary_json(const GrowthSummary& s) {
    return {{"theta", s.theta},     {"k0", s.k0},           {"lambda0", s.lambda0},
            {"has_band", s.has_band}, {"band_lo", s.band_lo}, {"band_hi", s.band_hi},
            {"regime", to_string(s.regime)}};
}

std::string norms_csv(const RunRecord& rec, int dim) {
    std::vector<std::string> header = {"t", "rho_l2", "u_l2", "rho_lp", "u_lp", "mass"};
    for (int a = 0; a < dim; ++a) header.push_back("momentum_" + std::to_string(a));
    const bool energy = !rec.samples.empty() && rec.samples.front().e_inf.has_value();
    if (energy) {
        header.push_back("e_inf");
        header.push_back("e_one");
    }
    CsvWriter csv(header);
    for (const auto& s : rec.samples) {
        std::vector<double> v = {s.t, s.rho_l2, s.u_l2, s.rho_lp, s.u_lp, s.mass};
        v.insert(v.end(), s.momentum.begin(), s.momentum.end());
        if (energy) {
            v.push_back(*s.e_inf);
            v.push_back(*s.e_one);
        }
        csv.row(v);
    }
    return csv.str();
}

json run_json(const RunRecord& rec, const std::string& hash) {
    return {{"manifest_hash", hash},
            {"aborted", rec.aborted},
            {"abort_kind", rec.abort_kind},
            {"abort_reason", rec.abort_reason},
            {"stopped_early", rec.stopped_early},
            {"samples", rec.samples.size()},
            {"t_last", rec.samples.empty() ? 0.0 : rec.samples.back().t},
            {"snapshots", rec.snapshots},
            {"run", rec.manifest}};
}

json run_manifest(const RunConfig& cfg) {
    return {{"config", cfg.document}, {"code_version", kCodeVersion}, {"seed", cfg.seed},
            {"scheme", to_string(cfg.solver.scheme)}};
}

struct Outcome {
    int code = kExitOk;
    std::string summary;
    std::optional<json> error;
};

Outcome do_spectrum(const SpectrumBlock& b, const Coefficients& c,
                    Artifacts& art) {
    CsvWriter csv({"k", "re_lambda_plus", "im_lambda_plus", "re_lambda_minus", "im_lambda_minus",
                   "discriminant", "branch"});
    for (int i = 0; i < b.n; ++i) {
        const double f = static_cast<double>(i) / (b.n - 1);
        const double k = b.log_spacing ? std::exp(std::log(b.k_min) + f * std::log(b.k_max / b.k_min))
                                       : b.k_min + f * (b.k_max - b.k_min);
        const ModeAnalysis m = analyze_mode(k, c);
        csv.row({fmt(k), fmt(m.lambda_plus.real()), fmt(m.lambda_plus.imag()),
                 fmt(m.lambda_minus.real()), fmt(m.lambda_minus.imag()), fmt(m.discriminant),
                 to_string(m.branch)});
    }
    art.text("spectrum.csv", csv.str());
    return {kExitOk, "spectrum: " + std::to_string(csv.rows()) + " rows\n", {}};
}

Outcome do_theta(const ThetaBlock& b, const Coefficients& c, const std::string& hash,
                 Artifacts& art) {
    const GrowthSummary s = max_growth(c, b.scan);
    CsvWriter csv({"k", "re_lambda_plus"});
    for (std::size_t i = 0; i < s.scan_k.size(); ++i) csv.row({s.scan_k[i], s.scan_re_lambda_plus[i]});
    art.text("theta_scan.csv", csv.str());
    json doc = summary_json(s);
    doc["manifest_hash"] = hash;
    art.json_doc("theta.json", doc);
    std::ostringstream out;
    out << "regime: " << to_string(s.regime) << "\nTheta = " << fmt(s.theta) << "\nk0 = " << fmt(s.k0)
        << "\n";
    if (s.has_band) out << "instability band: [" << fmt(s.band_lo) << ", " << fmt(s.band_hi) << "]\n";
    return {kExitOk, out.str(), {}};
}

Outcome do_simulate(const RunConfig& cfg, const SimulateBlock& b, const Coefficients& c,
                    const DispatchOptions& opts, const std::string& hash, Artifacts& art) {
    const FieldState init = make_initial_state(cfg, b.initial, c, opts.base_dir);
    RunHooks hooks;
    hooks.snapshot = [&](const FieldState& f, double t, long step) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "snap_%08ld", step);
        write_snapshot(art.dir() / "snapshots", stem, f, t);
        art.file(std::string("snapshots/") + stem + ".json");
        art.file(std::string("snapshots/") + stem + ".bin");
        return std::string("snapshots/") + stem + ".json";
    };
    const RunRecord rec = run(init, cfg.solver, c, cfg.params.pressure, hooks, run_manifest(cfg));
    art.text("norms.csv", norms_csv(rec, cfg.grid.dim));
    art.json_doc("run.json", run_json(rec, hash));
    std::ostringstream out;
    out << "samples: " << rec.samples.size() << "\nt_last = " << fmt(rec.samples.back().t)
        << "\nrho_l2(t_last) = " << fmt(rec.samples.back().rho_l2)
        << "\nu_l2(t_last) = " << fmt(rec.samples.back().u_l2) << "\n";
    Outcome o{kExitOk, out.str(), {}};
    if (rec.aborted) {
        o.code = kExitAborted;
        o.error = error_json(rec.abort_kind, rec.abort_reason);
        o.summary += "ABORTED: " + rec.abort_reason + "\n";
    }
    return o;
}

Outcome do_besov(const BesovBlockSpec& b, const DispatchOptions& opts, const std::string& hash,
                 Artifacts& art) {
    fs::path path = b.snapshot;
    if (path.is_relative()) path = opts.base_dir / path;
    const Snapshot snap = read_snapshot(path);
    SpectralGrid sg(snap.state.grid);
    const DyadicFilterBank bank = build_filter_bank(snap.state.grid);
    const BesovReport rep = b.field == "rho"
                                ? besov_norm(sg, bank, snap.state.rho, b.s, b.p, b.r, b.j0)
                                : besov_norm(sg, bank, snap.state.u, b.s, b.p, b.r, b.j0);
    json blocks = json::array();
    for (const auto& blk : rep.blocks)
        blocks.push_back({{"j", blk.j}, {"lp", blk.lp}, {"weighted", blk.weighted}});
    const bool r_inf = std::isinf(rep.r);
    const json doc = {{"manifest_hash", hash},
                      {"field", b.field},
                      {"t", snap.t},
                      {"s", rep.s},
                      {"p", std::isinf(rep.p) ? json("inf") : json(rep.p)},
                      {"r", r_inf ? json("inf") : json(rep.r)},
                      {"j0", rep.j0},
                      {"j_min", rep.j_min},
                      {"j_max", rep.j_max},
                      {"blocks", blocks},
                      {"total", rep.total},
                      {"low", rep.low},
                      {"high", rep.high},
                      {"note", "blocks outside [j_min, j_max] are unavailable on this lattice; "
                               "low sums j<=j0 and high sums j>=j0-1"}};
    art.json_doc("besov.json", doc);
    return {kExitOk, "Besov total = " + fmt(rep.total) + " (low " + fmt(rep.low) + ", high " +
                         fmt(rep.high) + ")\n", {}};
}

Outcome do_decay(const RunConfig& cfg, const DecayFitBlock& b, const Coefficients& c,
                 const DispatchOptions& opts, const std::string& hash, Artifacts& art) {
    json doc = {{"manifest_hash", hash}, {"source", b.source}};
    LineFit fit;
    if (b.source == "quadrature") {
        const DecaySeries s = linear_decay_quadrature(c, b.spec, opts.threads);
        CsvWriter csv({"t", "norm"});
        for (std::size_t i = 0; i < s.t.size(); ++i) csv.row({s.t[i], s.norm[i]});
        art.text("decay.csv", csv.str());
        fit = s.fit;
        doc["predicted"] = s.predicted;
        doc["theorem_exponent"] = s.theorem_exponent;
    } else {
        const FieldState init = make_initial_state(cfg, b.initial, c, opts.base_dir);
        const RunRecord rec = run(init, cfg.solver, c, cfg.params.pressure, {}, run_manifest(cfg));
        art.text("norms.csv", norms_csv(rec, cfg.grid.dim));
        if (rec.aborted) throw Error(rec.abort_kind, rec.abort_reason);
        const DecayFit df = nonlinear_decay_fit(rec, b.spec, cfg.grid, c);
        CsvWriter csv({"t", "norm"});
        for (const auto& smp : rec.samples) csv.row({smp.t, smp.l2()});
        art.text("decay.csv", csv.str());
        fit = df.fit;
        doc["predicted"] = b.spec.l2_exponent();
        doc["theorem_exponent"] = b.spec.theorem_exponent();
        doc["gap_time"] = df.gap_time;
        doc["caveat"] = df.caveat;
    }
    doc["exponent"] = fit.slope;
    doc["ci_half_width"] = fit.slope_half_width;
    doc["r_squared"] = fit.r_squared;
    doc["fit_points"] = fit.n;
    doc["fit_window"] = {b.spec.fit_lo, b.spec.fit_hi};
    art.json_doc("decay.json", doc);
    return {kExitOk, "decay exponent = " + fmt(fit.slope) + " +- " + fmt(fit.slope_half_width) + "\n", {}};
}

Outcome do_instability(const RunConfig& cfg, const InstabilityBlock& b, const Coefficients& c,
                       const std::string& hash, Artifacts& art) {
    const InstabilityReport rep = instability_linear_experiment(c, cfg.grid, b.spec);
    CsvWriter csv({"t", "rho_l2", "rho_lower", "rho_upper", "u_l2", "u_lower", "u_upper", "ok"});
    for (const auto& r : rep.rows)
        csv.row({fmt(r.t), fmt(r.rho_l2), fmt(r.rho_lower), fmt(r.rho_upper), fmt(r.u_l2),
                 fmt(r.u_lower), fmt(r.u_upper), r.ok ? "1" : "0"});
    art.text("sandwich.csv", csv.str());
    json doc = {{"manifest_hash", hash},
                {"growth", summary_json(rep.summary)},
                {"theta_bar", rep.theta_bar},
                {"zeta_bar", rep.zeta_bar},
                {"shells", rep.shells},
                {"min_growth_in_support", rep.min_growth_in_support},
                {"tol", rep.tol},
                {"shell_correction", rep.shell_correction},
                {"ratio", rep.ratio},
                {"passed", rep.passed()}};
    if (rep.narrowed_ratio) doc["narrowed_ratio"] = *rep.narrowed_ratio;
    if (rep.first_violation)
        doc["first_violation"] = {{"t", rep.first_violation->t},
                                  {"bound", rep.first_violation->bound},
                                  {"slack", rep.first_violation->slack}};
    art.json_doc("instability.json", doc);
    std::string text = std::string("sandwich ") + (rep.passed() ? "holds" : "VIOLATED") +
                       " on all samples\nratio = " + fmt(rep.ratio) + "\n";
    Outcome o{kExitOk, text, {}};
    if (!rep.passed()) {
        o.code = kExitFailure;
        o.error = error_json("SandwichViolation", "bound " + rep.first_violation->bound +
                                                      " missed at t=" + fmt(rep.first_violation->t));
    }
    return o;
}

Outcome do_escape(const RunConfig& cfg, const EscapeBlock& b, const Coefficients& c,
                  const DispatchOptions& opts, const std::string& hash, Artifacts& art) {
    const EscapeReport rep = escape_time_experiment(c, cfg.params.pressure, cfg.grid, b.spec, opts.threads);
    CsvWriter csv({"delta", "escaped", "t_escape", "predicted", "rho_l2", "u_l2", "error"});
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv.row({fmt(r.delta), r.escaped ? "1" : "0", fmt(r.t_escape), fmt(r.predicted),
                 fmt(r.rho_l2), fmt(r.u_l2), "\"" + r.error + "\""});
        rows.push_back({{"delta", r.delta}, {"escaped", r.escaped}, {"t_escape", r.t_escape},
                        {"predicted", r.predicted}, {"error", r.error}});
    }
    art.text("escape.csv", csv.str());
    json doc = {{"manifest_hash", hash},
                {"growth", summary_json(rep.summary)},
                {"theta_bar", rep.theta_bar},
                {"zeta_bar", rep.zeta_bar},
                {"epsilon0", b.spec.epsilon0},
                {"epsilon0_u", rep.epsilon0_u},
                {"monotone", rep.monotone},
                {"u_threshold_met", rep.u_threshold_met},
                {"scope", rep.scope_note},
                {"rows", rows}};
    if (rep.fit) {
        doc["slope"] = rep.fit->slope;
        doc["slope_ci_half_width"] = rep.fit->slope_half_width;
        doc["inverse_theta"] = 1.0 / rep.summary.theta;
        doc["slope_rel_error"] = rep.slope_rel_error;
    }
    art.json_doc("escape.json", doc);
    std::string text = "escape: " + rep.scope_note + "\n";
    if (rep.fit) text += "slope = " + fmt(rep.fit->slope) + " vs 1/Theta = " + fmt(1.0 / rep.summary.theta) + "\n";
    return {kExitOk, text, {}};
}

}  // namespace

std::string manifest_hash(const RunConfig& cfg) {
    return sha256_hex(std::string(kCodeVersion) + "\n" + cfg.document.dump());
}

FieldState make_initial_state(const RunConfig& cfg, const InitialData& init,
                              const Coefficients& coeffs, const fs::path& base_dir) {
    if (init.kind == "zero") return FieldState::zeros(cfg.grid);
    if (init.kind == "random") return make_random_data(cfg.grid, init.k_cut, init.amplitude, cfg.seed);
    if (init.kind == "decay") return make_decay_data(cfg.grid, init.sigma, init.amplitude);
    if (init.kind == "snapshot") {
        fs::path p = init.path;
        if (p.is_relative()) p = base_dir / p;
        Snapshot s = read_snapshot(p);
        if (!(s.state.grid == cfg.grid)) throw FormatError("snapshot grid differs from config grid");
        return s.state;
    }
    UnstableDataSpec ds;
    const GrowthSummary summary = max_growth(coeffs);
    ds.theta_bar = init.theta_bar > 0.0 ? init.theta_bar : 0.5 * summary.theta;
    ds.zeta_bar = init.zeta_bar;
    ds.amplitude = init.amplitude;
    return make_unstable_data(cfg.grid, coeffs, summary, ds).state;
}

int dispatch(const RunConfig& cfg, const DispatchOptions& opts) {
    const fs::path dir = opts.out.empty() ? fs::path(cfg.output_dir) : opts.out;
    Artifacts art(dir, opts.verbose);
    fs::remove(dir / "error.json");
    const std::string hash = manifest_hash(cfg);
    Outcome o;
    try {
        const Coefficients c = derive_coefficients(cfg.params);
        o = std::visit(
            [&](const auto& b) -> Outcome {
                using B = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<B, SpectrumBlock>) return do_spectrum(b, c, art);
                else if constexpr (std::is_same_v<B, ThetaBlock>) return do_theta(b, c, hash, art);
                else if constexpr (std::is_same_v<B, SimulateBlock>) return do_simulate(cfg, b, c, opts, hash, art);
                else if constexpr (std::is_same_v<B, BesovBlockSpec>) return do_besov(b, opts, hash, art);
                else if constexpr (std::is_same_v<B, DecayFitBlock>) return do_decay(cfg, b, c, opts, hash, art);
                else if constexpr (std::is_same_v<B, InstabilityBlock>) return do_instability(cfg, b, c, hash, art);
                else return do_escape(cfg, b, c, opts, hash, art);
            },
            cfg.block);
    } catch (const Error& e) {
        o.code = kExitFailure;
        o.error = error_json(e.kind(), e.what());
        o.summary = std::string("FAILED: ") + e.kind() + ": " + e.what() + "\n";
    } catch (const std::exception& e) {
        o.code = kExitFailure;
        o.error = error_json("InternalError", e.what());
        o.summary = std::string("FAILED: ") + e.what() + "\n";
    }

    if (o.error) {
        (*o.error)["manifest_hash"] = hash;
        write_json(dir / "error.json", *o.error);
    }
    art.text("summary.txt", "experiment: " + cfg.experiment + "\ncode version: " + kCodeVersion +
                                "\nmanifest hash: " + hash + "\n" + o.summary);
    json manifest = {{"code_version", kCodeVersion},
                           {"experiment", cfg.experiment},
                           {"seed", cfg.seed},
                           {"config", cfg.document},
                           {"coefficients", coeffs_json(derive_coefficients(cfg.params))},
                           {"manifest_hash", hash},
                           {"aborted", o.code != kExitOk},
                           {"outputs", art.hashes()}};
    if (cfg.grid.dim == 1) manifest["scope"] = "one-dimensional testbed, outside the d >= 2 theory";
    write_json(dir / "manifest.json", manifest);
    if (opts.verbose) std::cerr << o.summary;
    return o.code;
}

int run_document(const std::string& text, const std::string& subcommand,
                 const DispatchOptions& opts) {
    RunConfig cfg;
    try {
        cfg = parse_config(text);
        if (!subcommand.empty() && cfg.experiment != subcommand)
            throw ConfigError(std::vector<ConfigViolation>{{"/" + subcommand, "subcommand '" + subcommand +
                                                      "' needs a '" + subcommand +
                                                      "' experiment block (config has '" +
                                                      cfg.experiment + "')"}});
    } catch (const ConfigError& e) {
        json err = error_json("ConfigError", e.what());
        err["violations"] = json::array();
        for (const auto& v : e.violations())
            err["violations"].push_back({{"pointer", v.pointer}, {"message", v.message}});
        const fs::path dir = opts.out.empty() ? fs::path("out") : opts.out;
        write_json(dir / "error.json", err);
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return dispatch(cfg, opts);
}

}  // namespace yns
