#include <doctest.h>

#include <numbers>

#include "helpers.hpp"

using namespace umb;

namespace {

const ChartId kZ = ChartId::parse("Z+");

struct Fixed {
    SurfaceSpec spec;
    Vec2 start;
    int branch;
    bool reverse;
};

std::vector<Fixed> fixed_traces() {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const SurfaceSpec sq2 = SurfaceSpec::super_quadric(2, 3, 5, 2);
    const SurfaceSpec pe = SurfaceSpec::perturbed_ellipsoid(0.5, 0.2, 0.08);
    const SurfaceSpec el = SurfaceSpec::ellipsoid(1, 2, 3);
    return {{sq, {0.7, 0}, 1, false},   {sq, {0.7, 0}, 1, true},    {sq, {0.8, 0.8}, 1, false},
            {sq, {0.8, 0.4}, 0, false}, {sq, {0.8, 0.4}, 0, true},  {sq, {0.8, 0.4}, 1, false},
            {pe, {0.3, 0.5}, 0, false}, {pe, {0.3, 0.5}, 1, false}, {el, {0.2, 0.3}, 0, false},
            {sq2, {0.3, 0.2}, 1, false}};
}

double line_angle(const FundamentalForms& ff, const Vec2& a, const Vec2& b) {
    const double c = metric_dot(ff, a, b) / std::sqrt(metric_dot(ff, a, a) * metric_dot(ff, b, b));
    return std::acos(std::min(1.0, std::abs(c)));
}

}  // namespace

TEST_CASE("principal quadratic examples") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    try {
        principal_quadratic(sq, {kZ, 0, 0});
        FAIL("expected AllCoefficientsZero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AllCoefficientsZero);
    }

    const DirectionPair axis = principal_quadratic(sq, {kZ, 0, 0.5});
    CHECK(axis.A == 0);
    CHECK(axis.C == 0);
    REQUIRE(axis.dirs.size() == 2);
    CHECK(std::abs(axis.dirs[0].y()) < 1e-15);
    CHECK(std::abs(axis.dirs[1].x()) < 1e-15);

    FundamentalForms ff;
    ff.e = 2;
    ff.g = 1;
    const DirectionPair d = principal_quadratic(ff);
    REQUIRE(d.dirs.size() == 2);
    CHECK((d.dirs[0] - Vec2(1, 0)).norm() < 1e-15);
    CHECK((d.dirs[1] - Vec2(0, 1)).norm() < 1e-15);
}

TEST_CASE("root directions solve the quadratic and are I-orthogonal") {
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        for (const auto& cp : testing::random_chart_points(spec, kZ, 100, 17)) {
            const FundamentalForms ff = forms_closed(spec, cp);
            const DirectionPair dp = principal_quadratic(ff);
            if (dp.dirs.size() != 2) continue;
            for (const Vec2& w : dp.dirs) {
                const double q = dp.A * w.x() * w.x() + dp.B * w.x() * w.y() + dp.C * w.y() * w.y();
                CHECK(std::abs(q) < 1e-10 * (std::abs(dp.A) + std::abs(dp.B) + std::abs(dp.C) + 1e-300));
            }
            CHECK(std::abs(metric_dot(ff, dp.dirs[0], dp.dirs[1])) < 1e-8);
        }
    }
}

TEST_CASE("traces reproducing the portrait starts stay under the residual bound") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    for (Vec2 s : {Vec2(0.7, 0), Vec2(0.8, 0.8), Vec2(0.8, 0.4)}) {
        for (int b : {0, 1}) {
            for (bool rev : {false, true}) {
                TraceConfig cfg;
                cfg.reverse = rev;
                const CurveTrace t = trace_line(sq, {kZ, s.x(), s.y()}, b, 2.0, cfg);
                INFO(s.transpose() << " branch " << b << " reverse " << rev);
                CHECK(within_residual_bound(t, cfg));
                CHECK(t.max_residual() < 1e-5);
                CHECK(t.residuals.size() + 1 == t.points.size());
                for (std::size_t i = 1; i < t.arclength.size(); ++i) {
                    const double ds = t.arclength[i] - t.arclength[i - 1];
                    CHECK(ds > 0);
                    CHECK(ds <= cfg.max_step * (1 + 1e-12));
                    const Vec3 p0 = chart_to_ambient(sq, t.points[i - 1]);
                    const Vec3 p1 = chart_to_ambient(sq, t.points[i]);
                    CHECK((p1 - p0).norm() <= ds * (1 + 1e-6) + 1e-10);
                }
            }
        }
    }
}

TEST_CASE("stop reasons") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const CurveTrace diag = trace_line(sq, {kZ, 0.8, 0.8}, 0, 2.0);
    CHECK((diag.stop_reason == StopReason::NearUmbilic || diag.stop_reason == StopReason::ChartBoundary ||
           diag.stop_reason == StopReason::LengthReached));
    TraceConfig rev;
    rev.reverse = true;
    const CurveTrace inward = trace_line(sq, {kZ, 0.8, 0.8}, 0, 2.0, rev);
    CHECK((inward.stop_reason == StopReason::NearUmbilic || inward.stop_reason == StopReason::LengthReached));
    const CurveTrace rim = trace_line(sq, {kZ, 0.7, 0}, 0, 2.0);
    CHECK(rim.stop_reason == StopReason::ChartBoundary);
    CHECK(radicand(sq, kZ, rim.points.back().u, rim.points.back().v) < 0.05);
    const CurveTrace full = trace_line(sq, {kZ, 0.7, 0}, 1, 2.0);
    CHECK(full.stop_reason == StopReason::LengthReached);
    CHECK(full.arclength.back() == 2.0);
}

TEST_CASE("trace preconditions") {
    const SurfaceSpec sphere = load_spec(testing::sphere_path());
    try {
        trace_line(sphere, {kZ, 0.1, 0}, 0, 1.0);
        FAIL("expected StartsAtUmbilic");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StartsAtUmbilic);
    }
    try {
        trace_line(SurfaceSpec::super_quadric(1, 1, 1, 2), {kZ, 2, 0}, 0, 1.0);
        FAIL("expected InvalidChartPoint");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidChartPoint);
    }
}

TEST_CASE("branches leave I-orthogonally") {
    const SurfaceSpec pe = SurfaceSpec::perturbed_ellipsoid(0.5, 0.2, 0.08);
    for (Vec2 s : {Vec2(0.3, 0.5), Vec2(-0.6, 0.1), Vec2(0.9, -0.9)}) {
        const ChartPoint cp{kZ, s.x(), s.y()};
        const CurveTrace t0 = trace_line(pe, cp, 0, 1e-3);
        const CurveTrace t1 = trace_line(pe, cp, 1, 1e-3);
        const Vec2 d0(t0.points[1].u - s.x(), t0.points[1].v - s.y());
        const Vec2 d1(t1.points[1].u - s.x(), t1.points[1].v - s.y());
        const FundamentalForms ff = forms_closed(pe, cp);
        // chords of length 1e-3 deviate from the tangent by O(1e-3 * curvature of the line)
        const DirectionPair dp = principal_quadratic(ff);
        CHECK(std::abs(metric_dot(ff, dp.dirs[0], dp.dirs[1])) < 1e-6);
        CHECK(std::abs(line_angle(ff, d0, d1) - std::numbers::pi / 2) < 1e-2);
    }
}

TEST_CASE("realized directions follow the eigenvectors") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    TraceConfig cfg;
    cfg.max_step = 1e-3;
    const CurveTrace t = trace_line(sq, {kZ, 0.8, 0.4}, 1, 1.0, cfg);
    for (std::size_t i = 1; i + 1 < t.points.size(); ++i) {
        const Vec2 chord(t.points[i + 1].u - t.points[i - 1].u, t.points[i + 1].v - t.points[i - 1].v);
        const FundamentalForms ff = forms_closed(sq, t.points[i]);
        const CurvatureSummary cs = curvature_summary(ff);
        const double a = std::min(line_angle(ff, chord, cs.dir1), line_angle(ff, chord, cs.dir2));
        CHECK(a < 1e-4);
    }
}

TEST_CASE("mirror symmetry of traces") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(2, 3, 5, 2);
    const double u0 = 0.5;
    auto vertical_branch = [&](double u) {
        const DirectionPair dp = principal_quadratic(sq, {kZ, u, 0});
        return std::abs(dp.dirs[0].x()) < std::abs(dp.dirs[1].x()) ? 0 : 1;
    };
    auto upward = [&](double u, int b) {
        TraceConfig cfg;
        cfg.reverse = principal_quadratic(sq, {kZ, u, 0}).dirs[b].y() < 0;
        return trace_line(sq, {kZ, u, 0}, b, 0.5, cfg);
    };
    const CurveTrace right = upward(u0, vertical_branch(u0));
    const CurveTrace left = upward(-u0, vertical_branch(-u0));
    REQUIRE(right.points.size() == left.points.size());
    for (std::size_t i = 0; i < right.points.size(); ++i) {
        CHECK(std::abs(right.points[i].u + left.points[i].u) < 1e-9);
        CHECK(std::abs(right.points[i].v - left.points[i].v) < 1e-9);
    }
}

TEST_CASE("halving the tolerance never increases the max residual") {
    for (const Fixed& f : fixed_traces()) {
        TraceConfig cfg;
        cfg.reverse = f.reverse;
        TraceConfig half = cfg;
        half.abs_tol *= 0.5;
        half.rel_tol *= 0.5;
        const ChartPoint cp{kZ, f.start.x(), f.start.y()};
        const double r1 = trace_line(f.spec, cp, f.branch, 1.5, cfg).max_residual();
        const double r2 = trace_line(f.spec, cp, f.branch, 1.5, half).max_residual();
        INFO(f.spec.describe() << " " << f.start.transpose() << " " << f.branch);
        CHECK(r2 <= r1);
    }
}

TEST_CASE("residuals stay bounded approaching the diagonal umbilic") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const double c = std::pow(1.0 / 3.0, 0.25);
    for (int i = 0; i < 8; ++i) {
        const double t = std::numbers::pi * (i + 0.25) / 4;
        const ChartPoint cp{kZ, c + 0.03 * std::cos(t), c + 0.03 * std::sin(t)};
        for (int b : {0, 1}) {
            for (bool rev : {false, true}) {
                TraceConfig cfg;
                cfg.reverse = rev;
                const CurveTrace tr = trace_line(sq, cp, b, 0.1, cfg);
                CHECK(tr.max_residual() < 1e-5);
            }
        }
    }
}

TEST_CASE("residual log") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const CurveTrace one = trace_line(sq, {kZ, 0.7, 0}, 1, 1e-4);
    CHECK(one.residuals.size() == 1);
    CHECK(residual_log(one).size() == 1);
    const CurveTrace t = trace_line(sq, {kZ, 0.8, 0.4}, 1, 2.0);
    const auto log = residual_log(t);
    REQUIRE(log.size() == t.residuals.size());
    for (std::size_t i = 1; i < log.size(); ++i) CHECK(log[i].first > log[i - 1].first);
    for (const auto& [s, r] : log) CHECK(r < -5);
}

TEST_CASE("trace CSV layout") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const CurveTrace t = trace_line(sq, {kZ, 0.7, 0}, 1, 0.05);
    const std::string csv = trace_csv(sq, t);
    CHECK(csv.rfind("arclength,u,v,x,y,z,residual\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == t.points.size() + 1);
}
