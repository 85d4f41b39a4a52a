#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "umbilic/cli.hpp"

using namespace umb;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("umbilic_cli_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("forms subcommand") {
    const Run pole = run({"forms", "--spec", testing::spec_path("sq_1_1_1_2"), "--at", "0,0", "--chart", "Z+"});
    CHECK(pole.code == kExitPass);
    const Json j = Json::parse(pole.out);
    CHECK(j["forms"]["E"] == 1.0);
    CHECK(j["forms"]["e"] == 0.0);
    const Run outside = run({"forms", "--spec", testing::spec_path("sq_1_1_1_2"), "--at", "2,0", "--chart", "Z+"});
    CHECK(outside.code == kExitUsage);
    CHECK(outside.err.find("InvalidChartPoint") != std::string::npos);
    const Run convex = run({"forms", "--spec", testing::spec_path("pe_0.5_0.2_0.08"), "--convexity", "10000"});
    CHECK(convex.code == kExitPass);
}

TEST_CASE("umbilics subcommand") {
    const Run cmp = run({"umbilics", "--spec", testing::spec_path("sq_1_1_1_2"), "--compare-closed-form"});
    CHECK(cmp.code == kExitPass);
    const Json j = Json::parse(cmp.out);
    CHECK(j["count"] == 14);
    CHECK(j["closed_form"]["pass"] == true);

    const Run strict = run({"umbilics", "--spec", testing::spec_path("sq_1_1_1_2"), "--compare-closed-form",
                            "--tol-hausdorff", "1e-300"});
    CHECK(strict.code == kExitFailed);

    const Run th = run({"umbilics", "--spec", testing::spec_path("pe_0.5_0.2_0.05"), "--threshold"});
    CHECK(th.code == kExitPass);
    CHECK(Json::parse(th.out)["threshold"]["epsilon_critical"].get<double>() == doctest::Approx(0.0625));

    const Run sphere = run({"umbilics", "--spec", testing::sphere_path()});
    CHECK(sphere.code == kExitPass);
    CHECK(Json::parse(sphere.out)["umbilics"][0]["kind"] == "non_isolated");
    CHECK(sphere.err.find("warning") != std::string::npos);
}

TEST_CASE("trace subcommand") {
    const auto dir = scratch("trace");
    const std::string svg = (dir / "portrait.svg").string();
    const std::string rsvg = (dir / "residuals.svg").string();
    const Run r = run({"trace", "--spec", testing::spec_path("sq_1_1_1_2"), "--start", "0.7,0", "--branch", "both",
                       "--len", "2", "--svg", svg, "--residual-plot", rsvg, "--out", dir.string()});
    CHECK(r.code == kExitPass);
    const std::string s = read(svg);
    CHECK(s.find("<svg") != std::string::npos);
    std::size_t lines = 0;
    for (std::size_t p = s.find("<polyline"); p != std::string::npos; p = s.find("<polyline", p + 1)) ++lines;
    CHECK(lines == 2);
    CHECK(std::filesystem::exists(dir / "trace_0_b0.csv"));
    CHECK(std::filesystem::exists(dir / "trace_0_b1.csv"));
    CHECK(read((dir / "trace_0_b1.csv").string()).rfind("arclength,u,v,x,y,z,residual", 0) == 0);
    CHECK(std::filesystem::exists(rsvg));

    const Run portrait = run({"trace", "--spec", testing::spec_path("pe_0.3_0.516_0.1"), "--portrait", "diag"});
    CHECK(portrait.code == kExitPass);

    const Run sphere = run({"trace", "--spec", testing::sphere_path(), "--start", "0.1,0"});
    CHECK(sphere.code == kExitUsage);
    CHECK(sphere.err.find("StartsAtUmbilic") != std::string::npos);

    const Run tight = run({"trace", "--spec", testing::spec_path("sq_1_1_1_2"), "--start", "0.8,0.4",
                           "--tol-residual", "1e-14"});
    CHECK(tight.code == kExitFailed);
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify subcommand") {
    const Run sq = run({"verify", "--spec", testing::spec_path("sq_1_1_1_2")});
    CHECK(sq.code == kExitPass);
    const Json j = Json::parse(sq.out);
    CHECK(j["count"] == 14);
    CHECK(j["checks"]["poincare_hopf"]["detail"]["sum"] == 2.0);
    CHECK(j["checks"]["multiset"]["detail"]["alternative_reading"]["consistent"] == false);

    const Run gt = run({"verify", "--spec", testing::spec_path("pe_0.516_0.3_0.1")});
    CHECK(gt.code == kExitPass);
    CHECK(Json::parse(gt.out)["checks"]["multiset"]["detail"]["computed"] == "{-1 x2, 1/2 x8}");

    const Run again = run({"verify", "--spec", testing::spec_path("sq_1_1_1_2")});
    CHECK(again.out == sq.out);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"verify"}).code == kExitUsage);
    CHECK(run({"verify", "--spec", "/nonexistent.json"}).code == kExitUsage);
    CHECK(run({"verify", "--spec", testing::spec_path("sq_1_1_1_2"), "--tol-find", "-1"}).code == kExitUsage);
    CHECK(run({"trace", "--spec", testing::spec_path("sq_1_1_1_2"), "--start", "0.7"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitPass);
}
