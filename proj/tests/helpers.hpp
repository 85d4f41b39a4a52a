#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "umbilic/json_io.hpp"

namespace testing {

inline std::vector<std::string> bundled_spec_paths() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(UMB_SPEC_DIR))
        if (e.path().extension() == ".json") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string spec_path(const std::string& name) { return std::string(UMB_SPEC_DIR) + "/" + name + ".json"; }
inline std::string sphere_path() { return std::string(UMB_TEST_DIR) + "/sphere.json"; }

/// Uniform points of the chart's parameter box with radicand >= margin.
inline std::vector<umb::ChartPoint> random_chart_points(const umb::SurfaceSpec& spec, const umb::ChartId& chart,
                                                        std::size_t n, unsigned seed, double margin = 1e-3) {
    std::mt19937_64 rng(seed);
    const auto ext = umb::chart_extent(spec, chart);
    std::uniform_real_distribution<double> du(-ext[0], ext[0]), dv(-ext[1], ext[1]);
    std::vector<umb::ChartPoint> out;
    while (out.size() < n) {
        const umb::ChartPoint cp{chart, du(rng), dv(rng)};
        if (umb::is_valid(spec, cp, margin)) out.push_back(cp);
    }
    return out;
}

}  // namespace testing
