#pragma once

// Scenario ingestion and the verification pipelines behind the CLI.
//
// Scenario files are JSON with a strict schema (unknown keys are rejected).
// Reports are deterministic text plus CSV tables for sweeps; rerunning a
// scenario byte-reproduces its report except for the trailing timing line.
//
// Exit-status contract: 0 all checks pass, 1 a mathematical check failed,
// 2 input/validation error, 3 numerical failure (focal point, degenerate
// metric, evaluation error).

#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "gluecd/scenario_builtins.hpp"
#include "gluecd/version.hpp"
#include "gluecd/warp.hpp"
#include "gluecd/wasserstein.hpp"

namespace gluecd {

using Json = nlohmann::json;

namespace detail {

inline void expect_keys(const Json& j, const char* where,
                        std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
    std::string offenders;
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) offenders += (offenders.empty() ? "" : ", ") + item.key();
    }
    if (!offenders.empty())
        throw ValidationError(std::string("unknown key(s) in ") + where + ": " + offenders);
}

template <typename T>
T req(const Json& j, const char* where, const char* key) {
    if (!j.contains(key))
        throw ValidationError(std::string("missing key '") + key + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ValidationError(std::string("key '") + key + "' in " + where + " has the wrong type");
    }
}

template <typename T>
T opt(const Json& j, const char* where, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ValidationError(std::string("key '") + key + "' in " + where + " has the wrong type");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsed scenario.
// ---------------------------------------------------------------------------

struct Settings {
    int y_res = 33;          // interface grids (compatibility, c1)
    int grid_res = 33;       // manifold sweeps
    int sweep_y_res = 9;     // smoothing sweep interface resolution
    int sweep_t_res = 21;
    int sweep_t_fine_res = 41;
    int samples = 4096;      // low-discrepancy triple count
    std::uint64_t seed = 0;
};

struct Scenario {
    std::string name;
    std::string description;
    Json echo;  // canonical parsed form

    enum class SpaceType { Glued, Manifold, Interval, IntervalPair };
    SpaceType type = SpaceType::Manifold;

    std::optional<CollarGluedSpace> glued;
    std::optional<WeightedManifold> manifold;

    // interval / interval-pair data
    double a = 0.0, b = 0.0, c = 0.0;
    ScalarField density_left, density_right;
    double K = 0.0, N = 2.0;

    std::vector<Json> tasks;
    Settings settings;
};

namespace detail {

inline WeightedManifold parse_side(const Json& j, const char* where) {
    expect_keys(j, where, {"dim", "domain", "metric", "weight", "N", "faces"});
    const int dim = req<int>(j, where, "dim");
    if (dim < 1 || dim > kMaxDim) throw ValidationError("side dim must be 1..4");
    const auto dom_in = req<std::vector<std::vector<double>>>(j, where, "domain");
    if (static_cast<int>(dom_in.size()) != dim)
        throw ValidationError(std::string(where) + ": domain needs one interval per dimension");
    std::array<Interval, kMaxDim> dom{};
    for (int i = 0; i < dim; ++i) {
        if (dom_in[static_cast<std::size_t>(i)].size() != 2)
            throw ValidationError("domain intervals are [lo, hi] pairs");
        dom[i] = {dom_in[static_cast<std::size_t>(i)][0], dom_in[static_cast<std::size_t>(i)][1]};
        if (!(dom[i].lo < dom[i].hi)) throw ValidationError("domain interval must have lo < hi");
    }
    const auto metric_in = req<std::vector<std::string>>(j, where, "metric");
    if (static_cast<int>(metric_in.size()) != sym_count(dim))
        throw ValidationError(std::string(where) +
                              ": metric needs n(n+1)/2 components (upper triangle, row-major)");
    std::vector<ScalarField> comps;
    for (const std::string& s : metric_in) comps.push_back(parse_field(s, dim));
    MetricChart chart(dim, dom, std::move(comps));
    ScalarField weight = parse_field(req<std::string>(j, where, "weight"), dim);
    const double N = req<double>(j, where, "N");
    std::vector<Face> faces;
    for (const Json& fj : opt<Json>(j, where, "faces", Json::array())) {
        expect_keys(fj, "face", {"axis", "side", "role"});
        Face f;
        f.axis = req<int>(fj, "face", "axis") - 1;  // 1-based in files
        const std::string side = req<std::string>(fj, "face", "side");
        if (side != "min" && side != "max") throw ValidationError("face side must be min or max");
        f.at_min = side == "min";
        const std::string role = req<std::string>(fj, "face", "role");
        if (role == "glue")
            f.role = FaceRole::Glue;
        else if (role == "free")
            f.role = FaceRole::Free;
        else if (role == "zero-set")
            f.role = FaceRole::ZeroSet;
        else
            throw ValidationError("face role must be glue, free or zero-set");
        faces.push_back(f);
    }
    WeightedManifold wm{std::move(chart), std::move(weight), N, std::move(faces)};
    wm.validate();
    return wm;
}

}  // namespace detail

inline Scenario parse_scenario(const Json& j) {
    using detail::expect_keys;
    using detail::opt;
    using detail::req;

    Json full = j;
    if (full.contains("builtin")) {
        expect_keys(full, "scenario", {"builtin", "name", "tasks", "settings", "description"});
        const std::string bname = req<std::string>(full, "scenario", "builtin");
        Json base = Json::parse(builtin_scenario_text(bname));
        if (full.contains("name")) base["name"] = full["name"];
        if (full.contains("tasks")) base["tasks"] = full["tasks"];
        if (full.contains("settings")) base["settings"] = full["settings"];
        full = base;
    }
    expect_keys(full, "scenario", {"name", "description", "space", "tasks", "settings"});

    Scenario sc;
    sc.name = req<std::string>(full, "scenario", "name");
    sc.description = opt<std::string>(full, "scenario", "description", "");
    sc.echo = full;

    const Json& sp = full.contains("space") ? full.at("space") : Json();
    if (!sp.is_object()) throw ValidationError("scenario needs a 'space' object");
    const std::string type = req<std::string>(sp, "space", "type");
    if (type == "glued") {
        expect_keys(sp, "space", {"type", "side0", "side1"});
        WeightedManifold s0 = detail::parse_side(req<Json>(sp, "space", "side0"), "side0");
        WeightedManifold s1 = detail::parse_side(req<Json>(sp, "space", "side1"), "side1");
        sc.type = Scenario::SpaceType::Glued;
        sc.glued.emplace(assemble(std::move(s0), std::move(s1)));
    } else if (type == "manifold") {
        expect_keys(sp, "space", {"type", "side0"});
        sc.type = Scenario::SpaceType::Manifold;
        sc.manifold.emplace(detail::parse_side(req<Json>(sp, "space", "side0"), "side0"));
    } else if (type == "interval") {
        expect_keys(sp, "space", {"type", "domain", "density", "K", "N"});
        const auto dom = req<std::vector<double>>(sp, "space", "domain");
        if (dom.size() != 2 || !(dom[0] < dom[1]))
            throw ValidationError("interval domain is [a, b] with a < b");
        sc.type = Scenario::SpaceType::Interval;
        sc.a = dom[0];
        sc.b = dom[1];
        sc.density_left = parse_field(req<std::string>(sp, "space", "density"), 1);
        sc.K = req<double>(sp, "space", "K");
        sc.N = req<double>(sp, "space", "N");
    } else if (type == "interval-pair") {
        expect_keys(sp, "space", {"type", "left", "right", "K", "N"});
        const Json& lj = req<Json>(sp, "space", "left");
        const Json& rj = req<Json>(sp, "space", "right");
        expect_keys(lj, "space.left", {"domain", "density"});
        expect_keys(rj, "space.right", {"domain", "density"});
        const auto ld = req<std::vector<double>>(lj, "space.left", "domain");
        const auto rd = req<std::vector<double>>(rj, "space.right", "domain");
        if (ld.size() != 2 || rd.size() != 2 || ld[1] != rd[0])
            throw ValidationError("interval pair must share the gluing point: [a,b], [b,c]");
        sc.type = Scenario::SpaceType::IntervalPair;
        sc.a = ld[0];
        sc.b = ld[1];
        sc.c = rd[1];
        sc.density_left = parse_field(req<std::string>(lj, "space.left", "density"), 1);
        sc.density_right = parse_field(req<std::string>(rj, "space.right", "density"), 1);
        sc.K = req<double>(sp, "space", "K");
        sc.N = req<double>(sp, "space", "N");
    } else {
        throw ValidationError("space type must be glued, manifold, interval or interval-pair");
    }

    if (!full.contains("tasks") || !full.at("tasks").is_array() || full.at("tasks").empty())
        throw ValidationError("scenario needs a nonempty 'tasks' array");
    for (const Json& t : full.at("tasks")) sc.tasks.push_back(t);

    if (full.contains("settings")) {
        const Json& st = full.at("settings");
        expect_keys(st, "settings",
                    {"y_res", "grid_res", "sweep_y_res", "sweep_t_res", "sweep_t_fine_res",
                     "samples", "seed"});
        sc.settings.y_res = opt<int>(st, "settings", "y_res", sc.settings.y_res);
        sc.settings.grid_res = opt<int>(st, "settings", "grid_res", sc.settings.grid_res);
        sc.settings.sweep_y_res = opt<int>(st, "settings", "sweep_y_res", sc.settings.sweep_y_res);
        sc.settings.sweep_t_res = opt<int>(st, "settings", "sweep_t_res", sc.settings.sweep_t_res);
        sc.settings.sweep_t_fine_res =
            opt<int>(st, "settings", "sweep_t_fine_res", sc.settings.sweep_t_fine_res);
        sc.settings.samples = opt<int>(st, "settings", "samples", sc.settings.samples);
        sc.settings.seed = opt<std::uint64_t>(st, "settings", "seed", sc.settings.seed);
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Task execution.
// ---------------------------------------------------------------------------

struct TaskResult {
    std::string type;
    bool pass = false;
    bool numeric_error = false;
    std::string error;
    std::vector<std::pair<std::string, std::string>> fields;
    std::string csv_name;
    std::vector<std::string> csv;  // first line is the header
};

struct RunReport {
    std::string name;
    Json echo;
    std::vector<TaskResult> tasks;
    bool all_pass = false;
    int exit_code = 0;
    long timing_ms = 0;

    std::string text(bool with_timing = true) const {
        std::string out;
        out += "gluecd report\n";
        out += std::string("version: ") + kVersion + "\n";
        out += "scenario: " + name + "\n";
        out += "scenario_echo: " + echo.dump() + "\n";
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const TaskResult& t = tasks[i];
            out += "task " + std::to_string(i + 1) + ": " + t.type + "\n";
            for (const auto& [k, v] : t.fields) out += "  " + k + ": " + v + "\n";
            if (!t.error.empty()) out += "  error: " + t.error + "\n";
            out += std::string("  status: ") +
                   (t.numeric_error ? "ERROR" : (t.pass ? "PASS" : "FAIL")) + "\n";
        }
        out += std::string("overall: ") + (all_pass ? "PASS" : "FAIL") + "\n";
        if (with_timing) out += "timing_ms: " + std::to_string(timing_ms) + "\n";
        return out;
    }
};

namespace detail {

inline void put(TaskResult& t, const std::string& k, double v) {
    t.fields.emplace_back(k, format_double(v));
}
inline void put(TaskResult& t, const std::string& k, const std::string& v) {
    t.fields.emplace_back(k, v);
}

inline Point point_from(const Json& arr, int expect, const char* where) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != expect)
        throw ValidationError(std::string(where) + " must be an array of " +
                              std::to_string(expect) + " coordinates");
    Point p{};
    for (int i = 0; i < expect; ++i) p[i] = arr.at(static_cast<std::size_t>(i)).get<double>();
    return p;
}

inline const CollarGluedSpace& need_glued(const Scenario& sc, const char* task) {
    if (!sc.glued)
        throw ValidationError(std::string(task) + " task requires a glued space");
    return *sc.glued;
}

inline WeightedManifold interval_as_manifold(const Scenario& sc) {
    std::array<Interval, kMaxDim> dom{};
    dom[0] = {sc.a, sc.b};
    MetricChart chart(1, dom, {parse_field("1", 1)});
    return WeightedManifold{chart, sc.density_left, sc.N, {}};
}

inline const WeightedManifold need_manifold(const Scenario& sc, const char* task) {
    if (sc.manifold) return *sc.manifold;
    if (sc.type == Scenario::SpaceType::Interval) return interval_as_manifold(sc);
    throw ValidationError(std::string(task) + " task requires a manifold or interval space");
}

inline TaskResult run_compatibility(const Scenario& sc, const Json&) {
    TaskResult res;
    const CompatibilityReport rep = compatibility_report(need_glued(sc, "compatibility"),
                                                         sc.settings.y_res);
    put(res, "min_pi_eig", rep.min_pi_eig);
    put(res, "min_cond2_margin", rep.min_margin);
    put(res, "min_h_sum", rep.min_h_sum);
    put(res, "tolerance", rep.tol);
    res.pass = rep.pass;
    res.csv_name = "compatibility";
    const int nf = sc.glued->dim() - 1;
    std::string header;
    for (int i = 0; i < nf; ++i) header += "y" + std::to_string(i + 1) + ",";
    res.csv.push_back(header + "pi_min_eig,cond2_margin,h_sum");
    for (const CompatibilityRow& row : rep.rows) {
        std::string line;
        for (int i = 0; i < nf; ++i) line += format_double(row.y[i]) + ",";
        res.csv.push_back(line + format_double(row.pi_min_eig) + "," +
                          format_double(row.cond2_margin) + "," + format_double(row.h_sum));
    }
    return res;
}

inline TaskResult run_smooth_sweep(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "smooth-sweep task",
                {"type", "deltas", "K", "N", "C", "h", "max_epsilon"});
    TaskResult res;
    const auto deltas = req<std::vector<double>>(tj, "smooth-sweep", "deltas");
    const double K = req<double>(tj, "smooth-sweep", "K");
    const double N = req<double>(tj, "smooth-sweep", "N");
    SmoothingSweepOptions sw;
    sw.C = opt<double>(tj, "smooth-sweep", "C", 1.0);
    sw.h = opt<double>(tj, "smooth-sweep", "h", -1.0);
    sw.y_res = sc.settings.sweep_y_res;
    sw.t_res = sc.settings.sweep_t_res;
    sw.t_fine_res = sc.settings.sweep_t_fine_res;
    sw.compat_y_res = sc.settings.y_res;
    const double max_eps = opt<double>(tj, "smooth-sweep", "max_epsilon",
                                       std::numeric_limits<double>::infinity());
    const std::vector<SweepRow> rows =
        smoothing_sweep(need_glued(sc, "smooth-sweep"), N, K, deltas, sw);
    res.csv_name = "smooth_sweep";
    res.csv.push_back("delta,sup_metric_distance,min_bakry_emery_eig,epsilon");
    bool ok = true;
    double prev_eps = std::numeric_limits<double>::infinity();
    for (const SweepRow& r : rows) {
        if (!r.error.empty()) {
            res.numeric_error = true;
            res.error = r.error;
            ok = false;
            continue;
        }
        res.csv.push_back(format_double(r.delta) + "," + format_double(r.sup_dist) + "," +
                          format_double(r.min_eig) + "," + format_double(r.epsilon));
        put(res, "delta_" + format_double(r.delta) + "_epsilon", r.epsilon);
        if (r.epsilon > prev_eps + 1e-12) ok = false;
        prev_eps = r.epsilon;
    }
    if (!rows.empty() && rows.back().error.empty()) {
        put(res, "final_epsilon", rows.back().epsilon);
        put(res, "final_sup_distance", rows.back().sup_dist);
        if (rows.back().epsilon > max_eps) ok = false;
    }
    res.pass = ok && !res.numeric_error;
    return res;
}

inline TaskResult run_c1_check(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "c1-check task", {"type", "delta"});
    TaskResult res;
    const double delta = req<double>(tj, "c1-check", "delta");
    const CollarGluedSpace& gs = need_glued(sc, "c1-check");
    SmoothingProfile prof = SmoothingProfile::make(delta);
    const double after = c1_matching_check(deform(gs, prof), sc.settings.y_res);
    SmoothingProfile off = prof;
    off.enable_F = false;
    off.enable_Fcal = false;
    const double before = c1_matching_check(deform(gs, off), sc.settings.y_res);
    put(res, "jump_before_deformation", before);
    put(res, "jump_after_deformation", after);
    res.pass = after <= 1e-8;
    return res;
}

inline TaskResult run_needle(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "needle task", {"type", "y", "t_range", "K", "N"});
    TaskResult res;
    const CollarGluedSpace& gs = need_glued(sc, "needle");
    const double K = req<double>(tj, "needle", "K");
    const double N = req<double>(tj, "needle", "N");
    const auto range = req<std::vector<double>>(tj, "needle", "t_range");
    if (range.size() != 2) throw ValidationError("needle t_range is [t_min, t_max]");
    bool ok = true;
    int idx = 0;
    for (const Json& yj : req<Json>(tj, "needle", "y")) {
        const Point y = point_from(yj, gs.dim() - 1, "needle y point");
        const NeedleDensity nd = disintegrate_signed_distance(gs, y, range[0], range[1]);
        const NeedleJumpReport jump = needle_jump_check(nd, K, N, sc.settings.samples / 2);
        const LogDerivReport ld = logderiv_vs_meancurv(gs, y);
        const std::string tag = "y" + std::to_string(idx++);
        put(res, tag + "_h0", nd.eval(0.0));
        put(res, tag + "_kink_d_minus", jump.d_minus);
        put(res, tag + "_kink_d_plus", jump.d_plus);
        put(res, tag + "_jump_pass", jump.pass ? "true" : "false");
        put(res, tag + "_logderiv_dev", std::max(ld.dev0, ld.dev1));
        ok = ok && jump.pass && ld.pass;
    }
    res.pass = ok;
    return res;
}

inline TaskResult run_tilted_needle(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "tilted-needle task", {"type", "y", "b", "v"});
    TaskResult res;
    const CollarGluedSpace& gs = need_glued(sc, "tilted-needle");
    const Point y = point_from(req<Json>(tj, "tilted-needle", "y"), gs.dim() - 1,
                               "tilted-needle y");
    std::array<double, kMaxDim> v{};
    v[0] = 1.0;
    if (tj.contains("v")) {
        const Point vv = point_from(tj.at("v"), gs.dim() - 1, "tilted-needle v");
        for (int i = 0; i < gs.dim() - 1; ++i) v[i] = vv[i];
    }
    bool ok = true;
    for (double b : req<std::vector<double>>(tj, "tilted-needle", "b")) {
        const TiltedNeedleReport rep = tilted_needle_check(gs, y, v, b);
        put(res, "b_" + format_double(b) + "_numeric", rep.jump_numeric);
        put(res, "b_" + format_double(b) + "_formula", rep.jump_formula);
        put(res, "b_" + format_double(b) + "_rel_dev", rep.rel_dev);
        ok = ok && rep.pass;
    }
    res.pass = ok;
    return res;
}

inline TaskResult run_ricci_sweep(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "ricci-sweep task", {"type", "K"});
    TaskResult res;
    const WeightedManifold wm = need_manifold(sc, "ricci-sweep");
    const RicciSweepResult rep = ricci_bound_sweep(wm, sc.settings.grid_res);
    put(res, "min_eig", rep.min_eig);
    std::string argmin = "[";
    for (int i = 0; i < wm.dim(); ++i)
        argmin += (i ? ", " : "") + format_double(rep.argmin[i]);
    put(res, "argmin", argmin + "]");
    put(res, "evaluated", static_cast<double>(rep.evaluated));
    put(res, "skipped", static_cast<double>(rep.skipped.size()));
    if (tj.contains("K")) {
        const double K = tj.at("K").get<double>();
        put(res, "K", K);
        res.pass = rep.min_eig >= K - 1e-6;
    } else {
        res.pass = true;
    }
    return res;
}

inline TaskResult run_weight_concavity(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "weight-concavity task", {"type", "kappa_bar", "eta"});
    TaskResult res;
    const WeightedManifold wm = need_manifold(sc, "weight-concavity");
    const ConcavityReport rep =
        weight_concavity_check(wm, req<double>(tj, "weight-concavity", "kappa_bar"),
                               req<double>(tj, "weight-concavity", "eta"), sc.settings.grid_res);
    put(res, "theta", rep.theta);
    put(res, "max_eig", rep.max_eig);
    res.pass = rep.pass;
    return res;
}

inline TaskResult run_gradient_bound(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "gradient-bound task", {"type", "k", "L", "squared"});
    TaskResult res;
    const WeightedManifold wm = need_manifold(sc, "gradient-bound");
    const GradientBoundReport rep = gradient_bound_check(wm, req<double>(tj, "gradient-bound", "k"),
                                      req<double>(tj, "gradient-bound", "L"),
                                      opt<bool>(tj, "gradient-bound", "squared", false));
    put(res, "max_kf2_minus_L", rep.max_kf2_minus_L);
    put(res, "max_grad_term", rep.max_grad_term);
    res.pass = rep.pass;
    return res;
}

inline TaskResult run_warp(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "warp task",
                {"type", "r", "kappa", "K_F", "kappa_bar", "eta", "L"});
    TaskResult res;
    const WeightedManifold wm = need_manifold(sc, "warp");
    WarpedProductSpec spec = WarpedProductSpec::make(wm, opt<double>(tj, "warp", "r", 1.0));
    put(res, "fiber_dim", static_cast<double>(spec.m));

    const CollapseIdentityReport collapse = collapse_identity_check(spec, 9);
    put(res, "collapse_identity_dev", collapse.max_deviation);
    bool ok = collapse.pass;

    const WarpHypothesisReport hyp = warped_cd_hypothesis_check(
        spec, req<double>(tj, "warp", "kappa"), req<double>(tj, "warp", "K_F"),
        sc.settings.grid_res);
    put(res, "max_concavity_eig", hyp.max_concavity_eig);
    if (hyp.has_zero_set) put(res, "max_grad_excess", hyp.max_grad_excess);
    ok = ok && hyp.pass;

    if (tj.contains("kappa_bar") && tj.contains("eta") && tj.contains("L")) {
        const FiberRadiusResult fr =
            fiber_radius(wm, tj.at("kappa_bar").get<double>(), tj.at("eta").get<double>(),
                         tj.at("L").get<double>());
        put(res, "l_tilde", fr.l_tilde);
        put(res, "fiber_radius", fr.r);
        put(res, "radius_constrained", fr.constrained ? "true" : "false");
    }
    res.pass = ok;
    return res;
}

inline TaskResult run_kn_concavity(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "kn-concavity task", {"type", "samples"});
    TaskResult res;
    const int samples = opt<int>(tj, "kn-concavity", "samples", sc.settings.samples);
    KnReport rep;
    if (sc.type == Scenario::SpaceType::Interval) {
        MmInterval mm{sc.a, sc.b, sc.density_left, sc.K, sc.N};
        rep = kn_concavity_check(mm, samples, sc.settings.seed);
    } else if (sc.type == Scenario::SpaceType::IntervalPair) {
        const double e = 1.0 / (sc.N - 1.0);
        const ScalarField l = sc.density_left, r = sc.density_right;
        const double mid = sc.b;
        auto u = [l, r, mid, e](double x) {
            const double v = x <= mid ? l.value(make_point(x)) : r.value(make_point(x));
            return std::pow(std::max(0.0, v), e);
        };
        rep = kn_concavity_core(u, sc.a, sc.c, sc.K / (sc.N - 1.0), samples, sc.settings.seed);
    } else {
        throw ValidationError("kn-concavity task requires an interval space");
    }
    put(res, "max_violation", rep.max_violation);
    put(res, "witness_x0", rep.witness[0]);
    put(res, "witness_x1", rep.witness[1]);
    put(res, "witness_t", rep.witness[2]);
    res.pass = rep.pass;
    return res;
}

inline TaskResult run_glue_1d(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "glue-1d task", {"type", "samples"});
    if (sc.type != Scenario::SpaceType::IntervalPair)
        throw ValidationError("glue-1d task requires an interval-pair space");
    TaskResult res;
    const int samples = opt<int>(tj, "glue-1d", "samples", sc.settings.samples);
    const Glue1dReport rep = glue_1d(sc.density_left, sc.a, sc.b, sc.density_right, sc.b, sc.c,
                                     sc.K, sc.N, samples, sc.settings.seed);
    put(res, "left_max_violation", rep.left.max_violation);
    put(res, "right_max_violation", rep.right.max_violation);
    put(res, "kink_d_minus", rep.d_minus);
    put(res, "kink_d_plus", rep.d_plus);
    put(res, "kink_ok", rep.kink_ok ? "true" : "false");
    res.pass = rep.pass;
    return res;
}

inline TaskResult run_wasserstein(const Scenario& sc, const Json& tj) {
    expect_keys(tj, "wasserstein task", {"type", "mu0", "mu1", "times", "scan"});
    TaskResult res;
    double a, b, K, N;
    std::function<double(double)> weight;
    std::vector<double> breakpoints;
    if (sc.type == Scenario::SpaceType::Interval) {
        a = sc.a;
        b = sc.b;
        const ScalarField w = sc.density_left;
        weight = [w](double x) { return w.value(make_point(x)); };
    } else if (sc.type == Scenario::SpaceType::IntervalPair) {
        a = sc.a;
        b = sc.c;
        const ScalarField l = sc.density_left, r = sc.density_right;
        const double mid = sc.b;
        weight = [l, r, mid](double x) {
            return x <= mid ? l.value(make_point(x)) : r.value(make_point(x));
        };
        breakpoints.push_back(sc.b);
    } else {
        throw ValidationError("wasserstein task requires an interval space");
    }
    K = sc.K;
    N = sc.N;
    Wasserstein1dOptions opt_w;
    opt_w.breakpoints = breakpoints;
    if (tj.contains("times")) opt_w.times = tj.at("times").get<std::vector<double>>();

    bool ok = true;
    if (opt<bool>(tj, "wasserstein", "scan", false)) {
        // deterministic scan over well-separated block pairs
        const double len = b - a;
        const double width = len / 12.0;
        double worst = -std::numeric_limits<double>::infinity();
        std::array<double, 2> worst_pair{};
        for (int i = 0; i < 8; ++i)
            for (int j = i + 2; j < 8; ++j) {
                const double c0 = a + (i + 0.5) * len / 8.0;
                const double c1 = a + (j + 0.5) * len / 8.0;
                auto blk = [width](double c) {
                    return [c, width](double x) {
                        return std::abs(x - c) <= width / 2 ? 1.0 : 0.0;
                    };
                };
                Wasserstein1dOptions so = opt_w;
                so.breakpoints.insert(so.breakpoints.end(),
                                      {c0 - width / 2, c0 + width / 2, c1 - width / 2,
                                       c1 + width / 2});
                const WassersteinReport rep =
                    wasserstein_1d_cd_core(weight, a, b, K, N, blk(c0), blk(c1), so);
                if (rep.max_violation > worst) {
                    worst = rep.max_violation;
                    worst_pair = {c0, c1};
                }
            }
        put(res, "scan_worst_violation", worst);
        put(res, "scan_worst_mu0_center", worst_pair[0]);
        put(res, "scan_worst_mu1_center", worst_pair[1]);
        ok = worst <= opt_w.tol;
    }
    if (tj.contains("mu0") || tj.contains("mu1")) {
        const ScalarField mu0 = parse_field(req<std::string>(tj, "wasserstein", "mu0"), 1);
        const ScalarField mu1 = parse_field(req<std::string>(tj, "wasserstein", "mu1"), 1);
        auto r0 = [mu0](double x) { return mu0.value(make_point(x)); };
        auto r1 = [mu1](double x) { return mu1.value(make_point(x)); };
        const WassersteinReport rep = wasserstein_1d_cd_core(weight, a, b, K, N, r0, r1, opt_w);
        put(res, "max_violation", rep.max_violation);
        put(res, "w2", rep.w2);
        ok = ok && rep.pass;
    }
    res.pass = ok;
    return res;
}

}  // namespace detail

inline RunReport run_scenario(const Scenario& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.name = sc.name;
    rep.echo = sc.echo;
    bool any_fail = false, any_numeric = false;
    for (const Json& tj : sc.tasks) {
        const std::string type = detail::req<std::string>(tj, "task", "type");
        TaskResult res;
        try {
            if (type == "compatibility")
                res = detail::run_compatibility(sc, tj);
            else if (type == "smooth-sweep")
                res = detail::run_smooth_sweep(sc, tj);
            else if (type == "c1-check")
                res = detail::run_c1_check(sc, tj);
            else if (type == "needle")
                res = detail::run_needle(sc, tj);
            else if (type == "tilted-needle")
                res = detail::run_tilted_needle(sc, tj);
            else if (type == "ricci-sweep")
                res = detail::run_ricci_sweep(sc, tj);
            else if (type == "weight-concavity")
                res = detail::run_weight_concavity(sc, tj);
            else if (type == "gradient-bound")
                res = detail::run_gradient_bound(sc, tj);
            else if (type == "warp")
                res = detail::run_warp(sc, tj);
            else if (type == "kn-concavity")
                res = detail::run_kn_concavity(sc, tj);
            else if (type == "glue-1d")
                res = detail::run_glue_1d(sc, tj);
            else if (type == "wasserstein")
                res = detail::run_wasserstein(sc, tj);
            else
                throw ValidationError("unknown task type '" + type + "'");
        } catch (const ValidationError&) {
            throw;  // schema problems abort the run (exit 2)
        } catch (const Error& e) {
            res.numeric_error = true;
            res.error = e.what();
        }
        res.type = type;
        any_fail = any_fail || (!res.pass && !res.numeric_error);
        any_numeric = any_numeric || res.numeric_error;
        rep.tasks.push_back(std::move(res));
    }
    rep.all_pass = !any_fail && !any_numeric;
    rep.exit_code = any_numeric ? 3 : (any_fail ? 1 : 0);
    rep.timing_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count());
    return rep;
}

inline RunReport run_scenario_json(const Json& j) { return run_scenario(parse_scenario(j)); }

// Writes <name>.report.txt plus one CSV per task that produced a table.
inline void write_report(const RunReport& rep, const std::string& outdir) {
    std::ofstream txt(outdir + "/" + rep.name + ".report.txt");
    if (!txt) throw Error("cannot write report to " + outdir);
    txt << rep.text(true);
    for (std::size_t i = 0; i < rep.tasks.size(); ++i) {
        const TaskResult& t = rep.tasks[i];
        if (t.csv.empty()) continue;
        std::ofstream csv(outdir + "/" + rep.name + ".task" + std::to_string(i + 1) + "_" +
                          t.csv_name + ".csv");
        for (const std::string& line : t.csv) csv << line << "\n";
    }
}

}  // namespace gluecd
