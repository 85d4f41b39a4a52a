#include <doctest.h>

#include "helpers.hpp"
#include "oracle.hpp"

using namespace umb;

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(SurfaceSpec::super_quadric(-1, 1, 1, 2), Error);
    CHECK_THROWS_AS(SurfaceSpec::super_quadric(1, 1, 1, 0), Error);
    CHECK_THROWS_AS(SurfaceSpec::perturbed_ellipsoid(1, 1, -0.1), Error);
    CHECK_THROWS_AS(SurfaceSpec::ellipsoid(1, 0, 1), Error);
    try {
        SurfaceSpec::ellipsoid(1, 2, std::nan(""));
        FAIL("expected InvalidSpec");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSpec);
    }
}

TEST_CASE("chart points satisfy the implicit equation") {
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        for (const ChartId& chart : chart_atlas(spec)) {
            for (const auto& cp : testing::random_chart_points(spec, chart, 200, 7)) {
                const Vec3 p = chart_to_ambient(spec, cp);
                CHECK(std::abs(oracle::level(spec, p) - 1.0) < 1e-12);
                const auto back = ambient_to_chart(spec, chart, p);
                REQUIRE(back.has_value());
                CHECK(std::abs(back->u - cp.u) < 1e-12);
                CHECK(std::abs(back->v - cp.v) < 1e-12);
            }
        }
    }
}

TEST_CASE("every surface point sits in some chart with margin kDeltaCover") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (const auto& path : testing::bundled_spec_paths()) {
        const SurfaceSpec spec = load_spec(path);
        for (int i = 0; i < 500; ++i) {
            const Vec3 p = surface_point_along(spec, Vec3(n01(rng), n01(rng), n01(rng)));
            CHECK(std::abs(oracle::level(spec, p) - 1.0) < 1e-12);
            bool covered = false;
            for (const ChartId& c : chart_atlas(spec)) covered = covered || ambient_to_chart(spec, c, p, kDeltaCover);
            CHECK(covered);
        }
    }
}

TEST_CASE("points outside the chart domain are invalid") {
    const SurfaceSpec sq = SurfaceSpec::super_quadric(1, 1, 1, 2);
    const ChartPoint outside{ChartId::parse("Z+"), 2.0, 0.0};
    CHECK_FALSE(is_valid(sq, outside));
    CHECK_THROWS_AS(chart_to_ambient(sq, outside), Error);
    CHECK_THROWS_AS(ChartId::parse("W+"), Error);
    CHECK(ChartId::parse("EqY-").name() == "EqY-");
}

TEST_CASE("rotated equator chart is only offered for the perturbed ellipsoid") {
    auto count_rotated = [](const SurfaceSpec& s) {
        const auto atlas = chart_atlas(s);
        return std::count_if(atlas.begin(), atlas.end(),
                             [](const ChartId& c) { return c.kind == ChartKind::RotatedEquator; });
    };
    CHECK(count_rotated(SurfaceSpec::perturbed_ellipsoid(0.5, 0.2, 0.05)) == 2);
    CHECK(count_rotated(SurfaceSpec::super_quadric(1, 1, 1, 2)) == 0);
    CHECK(count_rotated(SurfaceSpec::ellipsoid(1, 2, 3)) == 0);
}

TEST_CASE("spec JSON follows the per-family schema") {
    const SurfaceSpec pe = SurfaceSpec::perturbed_ellipsoid(0.5, 0.2, 0.05);
    CHECK(spec_from_json(spec_to_json(pe)) == pe);
    const SurfaceSpec sq = SurfaceSpec::super_quadric(2, 3, 5, 2);
    CHECK(spec_from_json(spec_to_json(sq)) == sq);

    auto rejects = [](const char* text) {
        try {
            spec_from_json(Json::parse(text));
        } catch (const Error& e) {
            return e.code() == ErrorCode::InvalidSpec;
        }
        return false;
    };
    CHECK(rejects(R"({"family": "superquadric", "a": 1, "b": 1, "c": 1})"));
    CHECK(rejects(R"({"family": "superquadric", "a": 1, "b": 1, "c": 1, "k": 2.5})"));
    CHECK(rejects(R"({"family": "ellipsoid", "a": 1, "b": 2, "c": 3, "k": 2})"));
    CHECK(rejects(R"({"family": "perturbed_ellipsoid", "a": 1, "b": 2})"));
    CHECK(rejects(R"({"family": "torus", "a": 1})"));
    CHECK(rejects(R"({"family": "ellipsoid", "a": "1", "b": 2, "c": 3})"));
    CHECK(rejects(R"([1, 2, 3])"));
}

TEST_CASE("JSON emitter sorts keys and prints 17 significant digits") {
    const Json j = {{"b", 0.1}, {"a", 1}, {"c", {{"z", -0.0}, {"y", 2.5}}}};
    CHECK(dump_json(j) ==
          "{\n  \"a\": 1,\n  \"b\": 0.10000000000000001,\n  \"c\": {\n    \"y\": 2.5,\n    \"z\": 0\n  }\n}\n");
}
