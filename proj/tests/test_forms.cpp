#include <doctest.h>

#include "helpers.hpp"
#include "oracle.hpp"

using namespace umb;

TEST_CASE("forms at the superquadric pole") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const FundamentalForms ff = forms_closed(sq, {ChartId::parse("Z+"), 0, 0});
    CHECK(ff.E == 1);
    CHECK(ff.F == 0);
    CHECK(ff.G == 1);
    CHECK(ff.e == 0);
    CHECK(ff.f == 0);
    CHECK(ff.g == 0);
    CHECK(curvature_summary(ff).degenerate);
}

TEST_CASE("K and H agree with the implicit-surface formulas") {
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        for (const ChartId& chart : chart_atlas(spec)) {
            for (const auto& cp : testing::random_chart_points(spec, chart, 100, 11)) {
                const CurvatureSummary cs = curvature_summary(spec, cp);
                const oracle::Curvature oc = oracle::curvature(spec, chart_to_ambient(spec, cp));
                INFO(path << " " << chart.name() << " (" << cp.u << "," << cp.v << ")");
                CHECK(std::abs(cs.K - oc.K) <= 1e-9 * std::abs(oc.K) + 1e-12);
                CHECK(std::abs(cs.H - oc.H) <= 1e-9 * std::abs(oc.H) + 1e-12);
                CHECK(std::abs(cs.k1 * cs.k2 - oc.K) <= 1e-9 * std::abs(oc.K) + 1e-12);
                CHECK(cs.k1 >= cs.k2);
            }
        }
    }
}

TEST_CASE("principal directions are shape operator eigenvectors") {
    const SurfaceSpec spec = SurfaceSpec::ellipsoid(1, 2, 3);
    for (const auto& cp : testing::random_chart_points(spec, ChartId::parse("X-"), 50, 5)) {
        const FundamentalForms ff = forms_closed(spec, cp);
        const ShapeOperator so = shape_operator(ff);
        const CurvatureSummary cs = curvature_summary(ff);
        for (auto [k, d] : {std::pair{cs.k1, cs.dir1}, std::pair{cs.k2, cs.dir2}}) {
            const Vec2 sd(so.c00 * d.x() + so.c01 * d.y(), so.c10 * d.x() + so.c11 * d.y());
            CHECK((sd - k * d).norm() < 1e-9 * (1 + std::abs(k)));
        }
        CHECK(std::abs(metric_dot(ff, cs.dir1, cs.dir2)) < 1e-9);
        CHECK(std::abs(so.det() - cs.K) < 1e-9 * std::abs(cs.K));
        CHECK(std::abs(so.trace() - 2 * cs.H) < 1e-9 * std::abs(cs.H));
    }
}

TEST_CASE("numeric-derivative forms match the closed forms") {
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        for (const ChartId& chart : chart_atlas(spec)) {
            for (const auto& cp : testing::random_chart_points(spec, chart, 100, 13, 0.05)) {
                const FundamentalForms a = forms_closed(spec, cp);
                const FundamentalForms b = forms_numeric(spec, cp);
                const double pa[6] = {a.E, a.F, a.G, a.e, a.f, a.g};
                const double pb[6] = {b.E, b.F, b.G, b.e, b.f, b.g};
                for (int i = 0; i < 6; ++i)
                    CHECK(std::abs(pa[i] - pb[i]) <= std::max(1e-6 * std::abs(pa[i]), 1e-9));
            }
        }
    }
}

TEST_CASE("numeric forms refuse stencils that reach the rim") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    try {
        forms_numeric(sq, {ChartId::parse("Z+"), std::pow(1 - 1e-9, 0.25), 0});
        FAIL("expected MarginTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MarginTooSmall);
    }
}

TEST_CASE("convexity scan is deterministic and finds no negative curvature") {
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        const ConvexityReport r1 = convexity_scan(spec, 2000, 42);
        const ConvexityReport r2 = convexity_scan(spec, 2000, 42);
        CHECK(r1.pass);
        CHECK(r1.min_K >= -1e-10);
        CHECK(r1.min_K == r2.min_K);
        CHECK(r1.samples == 2000);
    }
}
