#include "umbilic/flowlines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "umbilic/umbilic.hpp"

namespace umb {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::LengthReached: return "LengthReached";
        case StopReason::NearUmbilic: return "NearUmbilic";
        case StopReason::ChartBoundary: return "ChartBoundary";
        case StopReason::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

double CurveTrace::max_residual() const {
    double m = 0;
    for (double r : residuals) m = std::max(m, r);
    return m;
}

double CurveTrace::excursion_fraction(double bound) const {
    if (residuals.empty()) return 0.0;
    const auto n = std::count_if(residuals.begin(), residuals.end(), [&](double r) { return r >= bound; });
    return static_cast<double>(n) / static_cast<double>(residuals.size());
}

namespace {

using std::numbers::pi;

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class DirectionField {
public:
    DirectionField(const SurfaceSpec& spec, const ChartId& chart) : spec_(spec), chart_(chart) {}

    // I-unit principal direction at y closest (as a line) to ref, oriented along ref.
    std::optional<Vec2> operator()(const Vec2& y, const Vec2& ref) const {
        const ChartPoint cp{chart_, y.x(), y.y()};
        if (!is_valid(spec_, cp)) return std::nullopt;
        const FundamentalForms ff = forms_closed(spec_, cp);
        const DirectionPair dp = principal_quadratic(ff);
        if (dp.dirs.size() != 2) return std::nullopt;
        const double d0 = metric_dot(ff, dp.dirs[0], ref);
        const double d1 = metric_dot(ff, dp.dirs[1], ref);
        Vec2 d = std::abs(d0) >= std::abs(d1) ? dp.dirs[0] : dp.dirs[1];
        if (metric_dot(ff, d, ref) < 0) d = -d;
        return d;
    }

    ChartPoint point(const Vec2& y) const { return {chart_, y.x(), y.y()}; }

private:
    const SurfaceSpec& spec_;
    ChartId chart_;
};

struct StepResult {
    Vec2 y;
    Vec2 f_end;
    double err = 0;
};

std::optional<StepResult> dp_step(const DirectionField& field, const Vec2& y, const Vec2& k1, double h) {
    auto eval = [&](const Vec2& p) { return field(p, k1); };
    const auto k2 = eval(y + h * a21 * k1);
    if (!k2) return std::nullopt;
    const auto k3 = eval(y + h * (a31 * k1 + a32 * *k2));
    if (!k3) return std::nullopt;
    const auto k4 = eval(y + h * (a41 * k1 + a42 * *k2 + a43 * *k3));
    if (!k4) return std::nullopt;
    const auto k5 = eval(y + h * (a51 * k1 + a52 * *k2 + a53 * *k3 + a54 * *k4));
    if (!k5) return std::nullopt;
    const auto k6 = eval(y + h * (a61 * k1 + a62 * *k2 + a63 * *k3 + a64 * *k4 + a65 * *k5));
    if (!k6) return std::nullopt;
    const Vec2 y1 = y + h * (b1 * k1 + b3 * *k3 + b4 * *k4 + b5 * *k5 + b6 * *k6);
    const auto k7 = eval(y1);
    if (!k7) return std::nullopt;
    const Vec2 err = h * (e1 * k1 + e3 * *k3 + e4 * *k4 + e5 * *k5 + e6 * *k6 + e7 * *k7);
    return StepResult{y1, *k7, err.norm()};
}

struct StepCheck {
    double residual = 0;  // normalized quadratic on the interpolant tangent at the midpoint
    double angle = 0;     // between that tangent and the principal direction there
};

// Midpoint of the cubic Hermite interpolant of an accepted step.
std::optional<StepCheck> check_step(const SurfaceSpec& spec, const ChartId& chart, const Vec2& y0, const Vec2& f0,
                                    const Vec2& y1, const Vec2& f1, double h) {
    const Vec2 ym = 0.5 * (y0 + y1) + 0.125 * h * (f0 - f1);
    const Vec2 dm = 1.5 * (y1 - y0) / h - 0.25 * (f0 + f1);
    const ChartPoint cp{chart, ym.x(), ym.y()};
    if (!is_valid(spec, cp)) return std::nullopt;
    const FundamentalForms ff = forms_closed(spec, cp);
    const DirectionPair dp = principal_quadratic(ff);
    if (dp.dirs.size() != 2) return std::nullopt;
    const Vec2 w = dm / std::sqrt(metric_dot(ff, dm, dm));
    StepCheck out;
    out.residual = dp.residual(ff, w);
    const double sq = std::sqrt(ff.metric_det());
    out.angle = 0.5 * pi;
    for (const Vec2& d : dp.dirs)
        out.angle = std::min(out.angle, std::asin(std::min(1.0, sq * std::abs(d.x() * w.y() - d.y() * w.x()))));
    return out;
}

}  // namespace

CurveTrace trace_line(const SurfaceSpec& spec, const ChartPoint& start, int branch, double arclen_max,
                      const TraceConfig& cfg) {
    if (!is_valid(spec, start))
        throw Error(ErrorCode::InvalidChartPoint, "trace start outside chart " + start.chart.name());
    if (branch != 0 && branch != 1) throw Error(ErrorCode::InvalidSpec, "branch must be 0 or 1");
    const FundamentalForms ff0 = forms_closed(spec, start);
    const DirectionPair dp0 = principal_quadratic(ff0);
    if (umbilic_residual(ff0) <= 10.0 * cfg.tol_find || dp0.dirs.size() != 2)
        throw Error(ErrorCode::StartsAtUmbilic, "trace start is an umbilic");

    const DirectionField field(spec, start.chart);
    CurveTrace trace;
    trace.branch = branch;
    trace.points.push_back(start);
    trace.arclength.push_back(0.0);

    Vec2 y(start.u, start.v);
    Vec2 f = dp0.dirs[branch];
    if (cfg.reverse) f = -f;
    double s = 0.0;
    double h = std::min(cfg.max_step, 1e-3);

    while (s < arclen_max) {
        const bool last = s + h >= arclen_max;
        const double step = last ? arclen_max - s : h;
        const auto res = dp_step(field, y, f, step);
        const double tol = cfg.abs_tol + cfg.rel_tol * y.norm();
        const double dir_tol = 100.0 * cfg.rel_tol;
        std::optional<StepCheck> chk;
        if (res && res->err <= tol) chk = check_step(spec, start.chart, y, f, res->y, res->f_end, step);
        if (!chk || chk->angle > dir_tol) {
            if (!res) {
                const ChartPoint probe = field.point(y + step * f);
                if (!is_valid(spec, probe, kDeltaCover)) {
                    trace.stop_reason = StopReason::ChartBoundary;
                    return trace;
                }
                h = 0.25 * step;
            } else if (res->err > tol) {
                h = step * std::max(0.2, 0.9 * std::pow(tol / res->err, 0.2));
            } else {
                h = step * (chk ? std::clamp(0.9 * std::cbrt(dir_tol / chk->angle), 0.2, 0.9) : 0.25);
            }
            if (h < cfg.min_step) {
                trace.stop_reason = StopReason::StepUnderflow;
                return trace;
            }
            continue;
        }

        trace.residuals.push_back(chk->residual);
        y = res->y;
        f = res->f_end;
        s = last ? arclen_max : s + step;
        trace.points.push_back(field.point(y));
        trace.arclength.push_back(s);

        if (!is_valid(spec, field.point(y), kDeltaCover)) {
            trace.stop_reason = StopReason::ChartBoundary;
            return trace;
        }
        if (umbilic_residual(spec, field.point(y)) < cfg.umb_stop) {
            trace.stop_reason = StopReason::NearUmbilic;
            return trace;
        }
        double grow = res->err > 0 ? 0.9 * std::pow(tol / res->err, 0.2) : 5.0;
        if (chk->angle > 0) grow = std::min(grow, 0.9 * std::cbrt(dir_tol / chk->angle));
        h = std::min(cfg.max_step, step * std::clamp(grow, 0.2, 5.0));
    }
    trace.stop_reason = StopReason::LengthReached;
    return trace;
}

std::vector<std::pair<double, double>> residual_log(const CurveTrace& trace) {
    std::vector<std::pair<double, double>> out;
    out.reserve(trace.residuals.size());
    for (std::size_t i = 0; i < trace.residuals.size(); ++i)
        out.emplace_back(trace.arclength[i + 1], std::log10(std::max(trace.residuals[i], 1e-300)));
    return out;
}

bool within_residual_bound(const CurveTrace& trace, const TraceConfig& cfg) {
    return trace.excursion_fraction(cfg.res_bound) <= cfg.excursion;
}

std::string trace_csv(const SurfaceSpec& spec, const CurveTrace& trace) {
    std::string out = "arclength,u,v,x,y,z,residual\n";
    char buf[256];
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const ChartPoint& cp = trace.points[i];
        const Vec3 p = chart_to_ambient(spec, cp);
        const double r = i == 0 ? 0.0 : trace.residuals[i - 1];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", trace.arclength[i], cp.u, cp.v,
                      p.x(), p.y(), p.z(), r);
        out += buf;
    }
    return out;
}

}  // namespace umb
