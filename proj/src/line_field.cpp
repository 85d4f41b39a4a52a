#include "umbilic/line_field.hpp"

#include <algorithm>
#include <numbers>

namespace umb {

using std::numbers::pi;

double DirectionPair::residual(const FundamentalForms& ff, const Vec2& d) const {
    const Vec2 w = d / std::sqrt(metric_dot(ff, d, d));
    const double scale = std::abs(A) + std::abs(B) + std::abs(C);
    if (scale == 0.0) return 0.0;
    return std::abs(A * w.x() * w.x() + B * w.x() * w.y() + C * w.y() * w.y()) / scale;
}

namespace {

double chart_angle(const Vec2& d) {
    double t = std::atan2(d.y(), d.x());
    if (t < 0) t += pi;
    if (t >= pi) t -= pi;
    return t;
}

}  // namespace

DirectionPair principal_quadratic(const FundamentalForms& ff) {
    DirectionPair dp;
    dp.A = ff.f * ff.E - ff.e * ff.F;
    dp.B = ff.g * ff.E - ff.e * ff.G;
    dp.C = ff.g * ff.F - ff.f * ff.G;
    const double A = dp.A, B = dp.B, C = dp.C;
    if (A == 0.0 && B == 0.0 && C == 0.0) return dp;

    const double sd = std::sqrt(std::max(B * B - 4.0 * A * C, 0.0));
    const double q = -0.5 * (B + std::copysign(sd, B));
    std::vector<Vec2> raw;
    if (A == 0.0 && C == 0.0) {
        raw = {Vec2(1, 0), Vec2(0, 1)};
    } else if (std::abs(A) >= std::abs(C)) {
        // roots in du/dv
        if (q == 0.0) raw = {Vec2(0, 1)};
        else raw = {Vec2(q / A, 1), Vec2(C / q, 1)};
    } else {
        // roots in dv/du
        if (q == 0.0) raw = {Vec2(1, 0)};
        else raw = {Vec2(1, q / C), Vec2(1, A / q)};
    }
    for (auto& d : raw) d /= std::sqrt(metric_dot(ff, d, d));
    std::sort(raw.begin(), raw.end(), [](const Vec2& x, const Vec2& y) { return chart_angle(x) < chart_angle(y); });
    dp.dirs = std::move(raw);
    return dp;
}

DirectionPair principal_quadratic(const SurfaceSpec& spec, const ChartPoint& cp) {
    const FundamentalForms ff = forms_closed(spec, cp);
    DirectionPair dp = principal_quadratic(ff);
    const CurvatureSummary cs = curvature_summary(ff);
    const double scale = (ff.E + ff.G) * (1.0 + std::abs(ff.e) + std::abs(ff.f) + std::abs(ff.g));
    const double tol = default_tol_umb(cs.k1, cs.k2) * scale;
    if (std::abs(dp.A) < tol && std::abs(dp.B) < tol && std::abs(dp.C) < tol)
        throw Error(ErrorCode::AllCoefficientsZero, "principal quadratic vanishes at " + cp.chart.name() + " point");
    return dp;
}

std::optional<double> major_direction_angle(const FundamentalForms& ff, double rel_tol) {
    const DirectionPair dp = principal_quadratic(ff);
    if (dp.dirs.size() != 2) return std::nullopt;
    const double ka = normal_curvature(ff, dp.dirs[0]);
    const double kb = normal_curvature(ff, dp.dirs[1]);
    if (!(std::abs(ka - kb) > rel_tol * (std::abs(ka) + std::abs(kb)))) return std::nullopt;
    return chart_angle(ka > kb ? dp.dirs[0] : dp.dirs[1]);
}

Vec2 doubled_angle_vector(const FundamentalForms& ff) {
    // Second form in the I-orthonormal frame (du/sqrt(E), ...) from the Cholesky factor of I.
    const double l00 = std::sqrt(ff.E);
    const double l10 = ff.F / l00;
    const double l11 = std::sqrt(ff.metric_det()) / l00;
    const double m00 = ff.e / ff.E;
    const double m01 = (ff.f - l10 * ff.e / l00) / (l00 * l11);
    const double m11 = (ff.g - 2.0 * l10 * ff.f / l00 + l10 * l10 * ff.e / ff.E) / (l11 * l11);
    return Vec2(m00 - m11, 2.0 * m01);
}

namespace {

struct Lift {
    bool ok = true;
    double total = 0;
    double max_jump = 0;
    int layers = 0;
};

class CircleLift {
public:
    CircleLift(const SurfaceSpec& spec, const ChartId& chart, const Vec2& center, double radius)
        : spec_(spec), chart_(chart), center_(center), radius_(radius) {}

    std::optional<Vec2> at(double t) const {
        const ChartPoint cp{chart_, center_.x() + radius_ * std::cos(t), center_.y() + radius_ * std::sin(t)};
        if (!is_valid(spec_, cp))
            throw Error(ErrorCode::CircleInvalid, "winding circle leaves chart " + chart_.name());
        const Vec2 w = doubled_angle_vector(forms_closed(spec_, cp));
        if (w.x() == 0.0 && w.y() == 0.0) return std::nullopt;
        return w;
    }

    // Change of the principal angle (half the doubled-angle change) from t0 to t1.
    // Arcs whose change stays >= pi/4 are bisected; a jump that survives down to
    // rounding-level arcs is a transition layer thinner than the sampling can
    // resolve, and the sign of the cross product fixes its direction.
    bool increment(double t0, const Vec2& w0, double t1, const Vec2& w1, int depth, Lift& lift) const {
        const double d = 0.5 * std::atan2(w0.x() * w1.y() - w0.y() * w1.x(), w0.dot(w1));
        if (std::abs(d) < 0.25 * pi || depth == 0) {
            lift.total += d;
            lift.max_jump = std::max(lift.max_jump, std::abs(d));
            return true;
        }
        const double tm = 0.5 * (t0 + t1);
        if (tm <= t0 || tm >= t1 || (t1 - t0) < 1e-15 * (1.0 + std::abs(t0))) {
            lift.total += d;
            ++lift.layers;
            return true;
        }
        const auto wm = at(tm);
        if (!wm) return false;
        return increment(t0, w0, tm, *wm, depth - 1, lift) && increment(tm, *wm, t1, w1, depth - 1, lift);
    }

private:
    const SurfaceSpec& spec_;
    ChartId chart_;
    Vec2 center_;
    double radius_;
};

Lift lift_circle(const CircleLift& circle, int n, double offset, int depth) {
    std::vector<double> ts(n + 1);
    std::vector<Vec2> ws(n + 1);
    for (int j = 0; j < n; ++j) {
        ts[j] = 2.0 * pi * j / n + offset;
        const auto w = circle.at(ts[j]);
        if (!w) return {false};
        ws[j] = *w;
    }
    ts[n] = ts[0] + 2.0 * pi;
    ws[n] = ws[0];
    Lift out;
    for (int j = 0; j < n; ++j)
        if (!circle.increment(ts[j], ws[j], ts[j + 1], ws[j + 1], depth, out)) return {false};
    return out;
}

}  // namespace

WindingResult line_field_winding(const SurfaceSpec& spec, const ChartId& chart, const Vec2& center,
                                 double radius, int samples) {
    if (samples < 8 || !(radius > 0.0))
        throw Error(ErrorCode::NonConvergentLift, "winding needs radius > 0 and at least 8 samples");
    const CircleLift circle(spec, chart, center, radius);
    auto run = [&](int n, int depth) -> std::optional<Lift> {
        // A sample exactly at a degenerate point: rotate the whole circle by a fraction of the spacing.
        for (int attempt = 0; attempt < 4; ++attempt) {
            Lift l = lift_circle(circle, n, attempt * 0.318309886 * 2.0 * pi / n, depth);
            if (l.ok) return l;
        }
        return std::nullopt;
    };
    auto finish = [&](const Lift& l, int n) {
        WindingResult wr;
        wr.twice_index = static_cast<int>(std::lround(l.total / pi));
        wr.samples = n;
        wr.max_jump = l.max_jump;
        wr.radius = radius;
        wr.thin_layers = l.layers;
        return wr;
    };
    for (int n = samples; n <= 16 * samples; n *= 2) {
        const auto lift = run(n, 0);
        if (!lift) throw Error(ErrorCode::NonConvergentLift, "principal directions degenerate on the winding circle");
        if (lift->max_jump < 0.25 * pi) return finish(*lift, n);
    }
    const int n = 16 * samples;
    const auto lift = run(n, 64);
    if (!lift) throw Error(ErrorCode::NonConvergentLift, "principal directions degenerate on the winding circle");
    if (lift->max_jump >= 0.25 * pi)
        throw Error(ErrorCode::NonConvergentLift, "lift jump stays above pi/4 after refinement");
    return finish(*lift, n);
}

}  // namespace umb
