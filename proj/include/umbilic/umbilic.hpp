#pragma once

#include <optional>
#include <string>
#include <vector>

#include "umbilic/forms.hpp"

namespace umb {

enum class UmbilicKind { Isolated, NonIsolated };

struct UmbilicRecord {
    Vec3 ambient = Vec3::Zero();
    ChartId chart;
    Vec2 uv = Vec2::Zero();
    double residual = 0;
    UmbilicKind kind = UmbilicKind::Isolated;
    std::optional<int> twice_index;  ///< 2 * index, filled in by the index module
    double index_radius = 0;
    int index_samples = 0;

    ChartPoint chart_point() const { return {chart, uv.x(), uv.y()}; }
    std::optional<double> index() const {
        if (!twice_index) return std::nullopt;
        return 0.5 * *twice_index;
    }
};

struct FinderConfig {
    int grid_n = 64;
    double tol_find = 1e-10;
    double r_dedup_rel = 1e-6;  ///< dedup radius as a fraction of the surface diameter
    int max_newton = 50;
};

struct FinderLog {
    std::size_t seeds = 0;
    std::size_t converged = 0;
    std::size_t spurious = 0;  ///< low-residual candidates rejected as valley points or by zero winding
    std::vector<std::string> messages;
};

/// sqrt((Gf-Fg)^2 + (Ef-eF)^2 + (Ge-Eg)^2) / ((EG-F^2)(1+|e|+|f|+|g|))
double umbilic_residual(const FundamentalForms& ff);
double umbilic_residual(const SurfaceSpec& spec, const ChartPoint& cp);

/// Same numerator scaled by (EG-F^2)(|e|+|f|+|g|): invariant under scaling the
/// second form, so it separates genuinely spherical patches from flat ones.
double relative_umbilic_residual(const FundamentalForms& ff);

std::vector<UmbilicRecord> find_umbilics(const SurfaceSpec& spec, const FinderConfig& cfg = {},
                                         FinderLog* log = nullptr);

/// Re-express an ambient point in the atlas chart where it sits deepest.
ChartPoint deepest_chart_point(const SurfaceSpec& spec, const Vec3& p);

/// Umbilic locations from the closed-form expressions (and the equator equation for
/// the perturbed ellipsoid). Throws NotApplicable where no closed form exists.
std::vector<Vec3> closed_form_umbilics(const SurfaceSpec& spec);

/// Positive roots u of the equator equation
///   u^2 (a + 2 eps u^2)^2 (6 eps Q + a - b) + (2 eps Q + a)^2 Q (a - b + 6 eps u^2) = 0
/// with Q = (sqrt(a^2 + 4 eps (1 - a u^2 - eps u^4)) - a) / (2 eps).
std::vector<double> equator_roots(double a, double b, double epsilon);

enum class Regime { AGreaterB, ALessB };

struct ThresholdReport {
    Regime regime = Regime::AGreaterB;
    double epsilon_critical = 0;
    int predicted_count_below = 2;
    int predicted_count_above = 10;
};

/// Throws NotApplicable when a == b.
ThresholdReport critical_epsilon(double a, double b);

/// Expected number of isolated umbilics where it is known in closed form; nullopt
/// for the square-symmetric perturbed ellipsoid, spheres, and eps within 1e-6
/// (relative) of the critical value.
std::optional<int> theorem_count(const SurfaceSpec& spec);

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

std::string to_string(UmbilicKind kind);
std::string to_string(Regime regime);

}  // namespace umb
