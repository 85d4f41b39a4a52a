#include "umbilic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "umbilic/svg.hpp"

namespace umb {

namespace {

using std::numbers::pi;

Json check(const std::string& status, Json detail = Json::object()) {
    return {{"status", status}, {"detail", std::move(detail)}};
}

Json vec_json(const Vec3& p) { return Json::array({p.x(), p.y(), p.z()}); }

Json multiset_json(const IndexMultiset& ms) {
    Json j = Json::object();
    for (const auto& [twice, n] : ms) j[format_half_integer(twice)] = n;
    return j;
}

// Index multisets stated for each family instance, where a statement exists.
std::optional<IndexMultiset> stated_multiset(const SurfaceSpec& spec) {
    switch (spec.family()) {
        case Family::SuperQuadric: {
            const auto& p = spec.super_quadric();
            if (p.k == 1) return std::nullopt;
            return IndexMultiset{{-1, 8}, {2, 6}};
        }
        case Family::Ellipsoid: {
            const auto& p = spec.ellipsoid();
            if (p.a == p.b && p.b == p.c) return std::nullopt;
            if (p.a == p.b || p.b == p.c || p.a == p.c) return IndexMultiset{{2, 2}};
            return IndexMultiset{{1, 4}};
        }
        case Family::PerturbedEllipsoid: {
            const auto& p = spec.perturbed_ellipsoid();
            if (p.a == p.b || !theorem_count(spec)) return std::nullopt;
            const ThresholdReport tr = critical_epsilon(p.a, p.b);
            if (p.epsilon < tr.epsilon_critical) return IndexMultiset{{2, 2}};
            if (tr.regime == Regime::AGreaterB) return IndexMultiset{{-2, 2}, {1, 8}};
            return IndexMultiset{{-1, 8}, {1, 8}, {2, 2}};
        }
    }
    return std::nullopt;
}

// Alternative assignment: -1/2 on the six axis umbilics and 1 on the eight
// diagonal ones; compare that with what was computed.
Json alternative_reading(const std::vector<UmbilicRecord>& recs) {
    std::set<int> axis, diag;
    for (const auto& r : recs) {
        if (!r.twice_index) continue;
        int zeros = 0;
        for (int i = 0; i < 3; ++i) zeros += std::abs(r.ambient[i]) < 1e-9;
        if (zeros == 2) axis.insert(*r.twice_index);
        if (zeros == 0) diag.insert(*r.twice_index);
    }
    auto halves = [](const std::set<int>& s) {
        Json a = Json::array();
        for (int t : s) a.push_back(0.5 * t);
        return a;
    };
    const bool consistent = axis == std::set<int>{-1} && diag == std::set<int>{2};
    return {{"claimed_axis_index", -0.5},
            {"claimed_diagonal_index", 1},
            {"computed_axis_indices", halves(axis)},
            {"computed_diagonal_indices", halves(diag)},
            {"consistent", consistent}};
}

}  // namespace

Json verify_report(const SurfaceSpec& spec, const VerifyOptions& opt) {
    Json checks = Json::object();
    bool pass = true;
    auto record = [&](const std::string& name, Json c) {
        if (c["status"] == "fail") pass = false;
        checks[name] = std::move(c);
    };

    const ConvexityReport cx = convexity_scan(spec, opt.convexity_samples, opt.seed);
    record("convexity", check(cx.pass ? "pass" : "fail", {{"min_K", cx.min_K},
                                                           {"samples", cx.samples},
                                                           {"argmin_chart", cx.argmin.chart.name()},
                                                           {"argmin_uv", {cx.argmin.u, cx.argmin.v}},
                                                           {"argmin_xyz", vec_json(cx.argmin_xyz)}}));

    std::vector<UmbilicRecord> recs = find_umbilics(spec, opt.finder);
    std::size_t isolated = 0, non_isolated = 0;
    for (const auto& r : recs) (r.kind == UmbilicKind::Isolated ? isolated : non_isolated)++;

    const std::optional<int> expected = theorem_count(spec);
    if (expected)
        record("count", check(static_cast<int>(isolated) == *expected && non_isolated == 0 ? "pass" : "fail",
                              {{"found", isolated}, {"expected", *expected}}));
    else
        record("count", check("not_applicable", {{"found", isolated}, {"non_isolated", non_isolated}}));

    try {
        const std::vector<Vec3> cf = closed_form_umbilics(spec);
        std::vector<Vec3> found;
        for (const auto& r : recs)
            if (r.kind == UmbilicKind::Isolated) found.push_back(r.ambient);
        const double hd = found.size() == cf.size() ? hausdorff_distance(found, cf) : INFINITY;
        record("closed_form", check(hd < opt.tol_hausdorff ? "pass" : "fail",
                                    {{"hausdorff", hd}, {"closed_form_count", cf.size()}, {"tolerance", opt.tol_hausdorff}}));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotApplicable) throw;
        record("closed_form", check("not_applicable", {{"reason", e.what()}}));
    }

    std::vector<std::string> index_errors;
    try {
        compute_indices(spec, recs, opt.index);
    } catch (const Error& e) {
        index_errors.push_back(e.what());
    }
    if (non_isolated > 0) {
        record("indices", check("not_applicable", {{"reason", "non-isolated umbilic set"}}));
        record("poincare_hopf", check("not_applicable", {{"reason", "non-isolated umbilic set"}}));
    } else {
        const bool all = index_errors.empty() &&
                         std::all_of(recs.begin(), recs.end(), [](const auto& r) { return r.twice_index.has_value(); });
        record("indices", check(all ? "pass" : "fail", {{"errors", index_errors}}));
        if (all) {
            const PoincareHopfReport ph = poincare_hopf_check(recs);
            record("poincare_hopf", check(ph.pass ? "pass" : "fail", {{"sum", ph.sum()}}));
            const IndexMultiset ms = index_multiset(recs);
            Json detail = {{"computed", format_multiset(ms)}, {"counts", multiset_json(ms)}};
            const auto stated = stated_multiset(spec);
            if (spec.family() == Family::SuperQuadric) detail["alternative_reading"] = alternative_reading(recs);
            if (stated) {
                detail["expected"] = format_multiset(*stated);
                record("multiset", check(ms == *stated ? "pass" : "fail", detail));
            } else {
                record("multiset", check("not_applicable", detail));
            }
        } else {
            record("poincare_hopf", check("fail", {{"reason", "missing indices"}}));
        }
    }

    return {{"spec", spec_to_json(spec)},
            {"seed", opt.seed},
            {"count", isolated},
            {"umbilics", umbilics_to_json(recs)},
            {"checks", checks},
            {"pass", pass}};
}

namespace {

struct Common {
    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    double tol_find = 1e-10;
    int grid = 64;
};

Vec2 parse_pair(const std::string& s) {
    std::istringstream in(s);
    double a, b;
    char comma;
    if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof())
        throw CLI::ValidationError("expected a pair u,v but got \"" + s + "\"");
    return {a, b};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::InvalidSpec, "cannot write " + path);
    f << text;
}

void emit_json(const Common& c, const std::string& name, const Json& j, std::ostream& out) {
    const std::string text = dump_json(j);
    out << text;
    if (!c.out_dir.empty()) {
        std::filesystem::create_directories(c.out_dir);
        write_file((std::filesystem::path(c.out_dir) / (name + ".json")).string(), text);
    }
}

FinderConfig finder_config(const Common& c) {
    FinderConfig f;
    f.grid_n = c.grid;
    f.tol_find = c.tol_find;
    return f;
}

IndexConfig index_config(const Common& c) {
    IndexConfig i;
    i.tol_find = c.tol_find;
    return i;
}

struct FormsOpts {
    std::string at;
    std::string chart = "Z+";
    std::size_t convexity = 0;
};

int cmd_forms(const Common& c, const FormsOpts& o, std::ostream& out) {
    const SurfaceSpec spec = load_spec(c.spec_path);
    Json j = {{"spec", spec_to_json(spec)}};
    int code = kExitPass;
    if (!o.at.empty()) {
        const Vec2 uv = parse_pair(o.at);
        const ChartPoint cp{ChartId::parse(o.chart), uv.x(), uv.y()};
        const FundamentalForms ff = forms_closed(spec, cp);
        j["forms"] = forms_to_json(cp, ff, curvature_summary(ff));
    }
    if (o.convexity > 0) {
        const ConvexityReport cx = convexity_scan(spec, o.convexity, c.seed);
        j["convexity"] = {{"min_K", cx.min_K},
                          {"samples", cx.samples},
                          {"seed", c.seed},
                          {"argmin_chart", cx.argmin.chart.name()},
                          {"argmin_uv", {cx.argmin.u, cx.argmin.v}},
                          {"argmin_xyz", vec_json(cx.argmin_xyz)},
                          {"pass", cx.pass}};
        if (!cx.pass) code = kExitFailed;
    }
    emit_json(c, "forms", j, out);
    return code;
}

struct UmbilicsOpts {
    bool compare = false;
    bool threshold = false;
    double tol_hausdorff = 1e-7;
};

int cmd_umbilics(const Common& c, const UmbilicsOpts& o, std::ostream& out, std::ostream& err) {
    const SurfaceSpec spec = load_spec(c.spec_path);
    Json j = {{"spec", spec_to_json(spec)}};
    int code = kExitPass;
    if (o.threshold) {
        if (spec.family() != Family::PerturbedEllipsoid)
            throw Error(ErrorCode::NotApplicable, "--threshold needs a perturbed_ellipsoid spec");
        const auto& p = spec.perturbed_ellipsoid();
        const ThresholdReport tr = critical_epsilon(p.a, p.b);
        j["threshold"] = {{"regime", to_string(tr.regime)},
                          {"epsilon_critical", tr.epsilon_critical},
                          {"count_below", tr.predicted_count_below},
                          {"count_above", tr.predicted_count_above}};
    }
    std::vector<UmbilicRecord> recs = find_umbilics(spec, finder_config(c));
    std::size_t isolated = 0;
    bool non_isolated = false;
    for (const auto& r : recs) {
        if (r.kind == UmbilicKind::Isolated) ++isolated;
        else non_isolated = true;
    }
    if (non_isolated) err << "warning: non-isolated umbilic set; indices are not defined there\n";
    try {
        compute_indices(spec, recs, index_config(c));
    } catch (const Error& e) {
        err << "warning: " << e.what() << "\n";
    }
    j["count"] = isolated;
    j["umbilics"] = umbilics_to_json(recs);
    if (o.compare) {
        const std::vector<Vec3> cf = closed_form_umbilics(spec);
        std::vector<Vec3> found;
        for (const auto& r : recs)
            if (r.kind == UmbilicKind::Isolated) found.push_back(r.ambient);
        const double hd = found.size() == cf.size() ? hausdorff_distance(found, cf) : INFINITY;
        const bool ok = hd < o.tol_hausdorff;
        j["closed_form"] = {{"count", cf.size()}, {"hausdorff", hd}, {"tolerance", o.tol_hausdorff}, {"pass", ok}};
        if (!ok) code = kExitFailed;
    }
    emit_json(c, "umbilics", j, out);
    return code;
}

int cmd_verify(const Common& c, const VerifyOptions& base, std::ostream& out, std::ostream& err) {
    const SurfaceSpec spec = load_spec(c.spec_path);
    VerifyOptions opt = base;
    opt.seed = c.seed;
    opt.finder = finder_config(c);
    opt.index = index_config(c);
    const Json report = verify_report(spec, opt);
    emit_json(c, "verify", report, out);
    if (report["pass"].get<bool>()) return kExitPass;
    for (const char* name : {"convexity", "count", "closed_form", "indices", "poincare_hopf", "multiset"}) {
        if (report["checks"].contains(name) && report["checks"][name]["status"] == "fail") {
            err << "verification failed: " << name << "\n";
            break;
        }
    }
    return kExitFailed;
}


struct TraceOpts {
    std::vector<std::string> starts;
    std::string chart = "Z+";
    std::string branch = "both";
    double len = 0;
    std::string svg;
    std::string portrait;
    std::string residual_plot;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double res_bound = 1e-5;
};

// Both halves of the line through a start, joined into one run with signed arclength.
struct FullTrace {
    Vec2 start;
    int branch = 0;
    CurveTrace backward, forward;
};

std::vector<Vec2> joined_uv(const FullTrace& t) {
    std::vector<Vec2> pts;
    for (auto it = t.backward.points.rbegin(); it != t.backward.points.rend(); ++it) pts.emplace_back(it->u, it->v);
    for (std::size_t i = 1; i < t.forward.points.size(); ++i)
        pts.emplace_back(t.forward.points[i].u, t.forward.points[i].v);
    return pts;
}

std::string joined_csv(const SurfaceSpec& spec, const FullTrace& t) {
    CurveTrace j;
    const auto& b = t.backward;
    const auto& f = t.forward;
    for (std::size_t i = b.points.size(); i-- > 0;) {
        j.points.push_back(b.points[i]);
        j.arclength.push_back(-b.arclength[i]);
    }
    for (std::size_t i = b.residuals.size(); i-- > 0;) j.residuals.push_back(b.residuals[i]);
    for (std::size_t i = 1; i < f.points.size(); ++i) {
        j.points.push_back(f.points[i]);
        j.arclength.push_back(f.arclength[i]);
    }
    j.residuals.insert(j.residuals.end(), f.residuals.begin(), f.residuals.end());
    return trace_csv(spec, j);
}

Json half_json(const CurveTrace& t, const TraceConfig& cfg) {
    return {{"stop_reason", to_string(t.stop_reason)},
            {"steps", t.residuals.size()},
            {"arclength", t.arclength.back()},
            {"end_uv", {t.points.back().u, t.points.back().v}},
            {"max_residual", t.max_residual()},
            {"excursion_fraction", t.excursion_fraction(cfg.res_bound)}};
}

struct Fan {
    ChartId chart;
    Vec2 center;
    std::vector<Vec2> starts;
    double len = 0;
};

Fan portrait_fan(const SurfaceSpec& spec, const std::string& which, const Common& c) {
    const std::vector<UmbilicRecord> recs = find_umbilics(spec, finder_config(c));
    const ChartId zp = ChartId::parse("Z+");
    std::optional<ChartPoint> centre;
    for (const auto& r : recs) {
        if (r.kind != UmbilicKind::Isolated) continue;
        if (which == "pole" || which == "diag") {
            const auto cp = ambient_to_chart(spec, zp, r.ambient);
            if (!cp) continue;
            const bool pole = std::abs(cp->u) < 1e-9 && std::abs(cp->v) < 1e-9;
            const bool diag = cp->u > 1e-9 && std::abs(cp->u - cp->v) < 1e-9;
            if ((which == "pole" && pole) || (which == "diag" && diag)) {
                centre = *cp;
                break;
            }
        } else if (std::abs(r.ambient.z()) < 1e-9 && r.ambient.x() > 1e-9 && r.ambient.y() >= -1e-12) {
            centre = r.chart_point();
            break;
        }
    }
    if (!centre) throw Error(ErrorCode::NotApplicable, "no isolated " + which + " umbilic on this surface");
    const Vec2 o(centre->u, centre->v);
    double nearest = INFINITY;
    for (const auto& r : recs) {
        const auto cp = ambient_to_chart(spec, centre->chart, r.ambient);
        if (!cp) continue;
        const double d = (Vec2(cp->u, cp->v) - o).norm();
        if (d > 1e-9) nearest = std::min(nearest, d);
    }
    Fan fan;
    fan.chart = centre->chart;
    fan.center = o;
    double rho = std::min(0.1, 0.25 * nearest);
    while (rho > 1e-4 && !is_valid(spec, {centre->chart, o.x() + rho, o.y()}, kDeltaCover)) rho *= 0.5;
    const int n = 12;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * pi * (i + 0.5) / n;
        fan.starts.push_back(o + rho * Vec2(std::cos(t), std::sin(t)));
    }
    fan.len = 6.0 * rho;
    return fan;
}

int cmd_trace(const Common& c, const TraceOpts& o, std::ostream& out) {
    const SurfaceSpec spec = load_spec(c.spec_path);
    TraceConfig cfg;
    cfg.abs_tol = o.abs_tol;
    cfg.rel_tol = o.rel_tol;
    cfg.res_bound = o.res_bound;
    cfg.tol_find = c.tol_find;

    ChartId chart = ChartId::parse(o.chart);
    std::vector<Vec2> starts;
    for (const auto& s : o.starts) starts.push_back(parse_pair(s));
    double len = o.len > 0 ? o.len : 2.0;
    SvgPlot plot;
    if (!o.portrait.empty()) {
        const Fan fan = portrait_fan(spec, o.portrait, c);
        chart = fan.chart;
        starts.insert(starts.end(), fan.starts.begin(), fan.starts.end());
        if (!(o.len > 0)) len = fan.len;
        plot.markers.push_back(fan.center);
    }
    if (starts.empty()) throw CLI::ValidationError("trace needs --start or --portrait");
    std::vector<int> branches;
    if (o.branch == "both") branches = {0, 1};
    else if (o.branch == "0" || o.branch == "1") branches = {o.branch == "1"};
    else throw CLI::ValidationError("--branch must be 0, 1 or both");

    const ChartId tc = chart;
    plot.title = spec.describe() + " lines of curvature, chart " + chart.name();
    plot.x_label = "u (" + chart.name() + ")";
    plot.y_label = "v (" + chart.name() + ")";
    SvgPlot rplot;
    rplot.title = spec.describe() + " log10 residual";
    rplot.x_label = "arclength";
    rplot.y_label = "log10 residual";

    Json traces = Json::array();
    bool ok = true;
    static const char* colours[2] = {"#1f4e9c", "#d35400"};
    for (std::size_t si = 0; si < starts.size(); ++si) {
        for (int b : branches) {
            FullTrace t;
            t.start = starts[si];
            t.branch = b;
            const ChartPoint cp{tc, t.start.x(), t.start.y()};
            TraceConfig fwd = cfg, bwd = cfg;
            bwd.reverse = true;
            t.forward = trace_line(spec, cp, b, len, fwd);
            t.backward = trace_line(spec, cp, b, len, bwd);
            const bool good = within_residual_bound(t.forward, cfg) && within_residual_bound(t.backward, cfg);
            ok = ok && good;
            traces.push_back({{"start", {t.start.x(), t.start.y()}},
                              {"chart", tc.name()},
                              {"branch", b},
                              {"forward", half_json(t.forward, cfg)},
                              {"backward", half_json(t.backward, cfg)},
                              {"within_bound", good}});
            plot.lines.push_back({joined_uv(t), colours[b]});
            Polyline rl;
            rl.stroke = colours[b];
            for (const auto& [s, r] : residual_log(t.backward)) rl.points.emplace_back(-s, r);
            std::reverse(rl.points.begin(), rl.points.end());
            for (const auto& [s, r] : residual_log(t.forward)) rl.points.emplace_back(s, r);
            rplot.lines.push_back(rl);
            if (!c.out_dir.empty()) {
                std::filesystem::create_directories(c.out_dir);
                const std::string name = "trace_" + std::to_string(si) + "_b" + std::to_string(b) + ".csv";
                write_file((std::filesystem::path(c.out_dir) / name).string(), joined_csv(spec, t));
            }
        }
    }
    if (!o.svg.empty()) write_file(o.svg, render_svg(plot));
    if (!o.residual_plot.empty()) write_file(o.residual_plot, render_svg(rplot));
    Json j = {{"spec", spec_to_json(spec)},
              {"res_bound", cfg.res_bound},
              {"excursion_allowance", cfg.excursion},
              {"traces", traces},
              {"pass", ok}};
    emit_json(c, "trace", j, out);
    return ok ? kExitPass : kExitFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Umbilic points of superquadrics and perturbed ellipsoids"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--spec", c.spec_path, "surface spec JSON")->required();
        sub->add_option("--out", c.out_dir, "directory for JSON/CSV artifacts");
        sub->add_option("--seed", c.seed, "seed for random sampling");
        sub->add_option("--tol-find", c.tol_find, "umbilic residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--grid", c.grid, "finder seed grid per chart")->check(CLI::Range(4, 4096));
    };

    FormsOpts fo;
    auto* forms = app.add_subcommand("forms", "fundamental forms and curvatures");
    add_common(forms);
    forms->add_option("--at", fo.at, "chart point u,v");
    forms->add_option("--chart", fo.chart, "chart name such as Z+ or EqY-");
    forms->add_option("--convexity", fo.convexity, "number of Gaussian curvature samples");

    UmbilicsOpts uo;
    auto* umbs = app.add_subcommand("umbilics", "locate and index umbilics");
    add_common(umbs);
    umbs->add_flag("--compare-closed-form", uo.compare, "compare with the closed-form locations");
    umbs->add_flag("--threshold", uo.threshold, "report the critical epsilon");
    umbs->add_option("--tol-hausdorff", uo.tol_hausdorff)->check(CLI::PositiveNumber);

    TraceOpts to;
    auto* trace = app.add_subcommand("trace", "integrate lines of curvature");
    add_common(trace);
    trace->add_option("--start", to.starts, "start point u,v (repeatable)");
    trace->add_option("--chart", to.chart);
    trace->add_option("--branch", to.branch, "0, 1 or both");
    trace->add_option("--len", to.len, "arclength in each direction")->check(CLI::PositiveNumber);
    trace->add_option("--svg", to.svg, "portrait SVG path");
    trace->add_option("--portrait", to.portrait, "fan of starts around an umbilic")
        ->check(CLI::IsMember({"pole", "diag", "equator"}));
    trace->add_option("--residual-plot", to.residual_plot, "log-residual SVG path");
    trace->add_option("--tol-abs", to.abs_tol)->check(CLI::PositiveNumber);
    trace->add_option("--tol-rel", to.rel_tol)->check(CLI::PositiveNumber);
    trace->add_option("--tol-residual", to.res_bound)->check(CLI::PositiveNumber);

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "run every check on one spec");
    add_common(verify);
    verify->add_option("--convexity", vo.convexity_samples)->check(CLI::PositiveNumber);
    verify->add_option("--tol-hausdorff", vo.tol_hausdorff)->check(CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitPass;
        }
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*forms) return cmd_forms(c, fo, out);
        if (*umbs) return cmd_umbilics(c, uo, out, err);
        if (*trace) return cmd_trace(c, to, out);
        if (*verify) return cmd_verify(c, vo, out, err);
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace umb
