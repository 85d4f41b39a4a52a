#pragma once

#include <cstdint>

#include "umbilic/surface.hpp"

namespace umb {

/// First (E,F,G) and second (e,f,g) fundamental form coefficients. The second
/// form is taken against the unit inward normal, so principal curvatures are
/// positive on these convex surfaces.
struct FundamentalForms {
    double E = 1, F = 0, G = 1;
    double e = 0, f = 0, g = 0;

    double metric_det() const { return E * G - F * F; }
};

/// Weingarten matrix C = I^{-1} II acting on chart tangent vectors (du, dv).
struct ShapeOperator {
    double c00 = 0, c01 = 0, c10 = 0, c11 = 0;

    double trace() const { return c00 + c11; }
    double det() const { return c00 * c11 - c01 * c10; }
};

struct CurvatureSummary {
    double K = 0, H = 0;
    double k1 = 0, k2 = 0;  ///< k1 >= k2
    Vec2 dir1{1, 0}, dir2{0, 1};
    bool degenerate = false;  ///< |k1 - k2| below tol_umb; dirs are the I-orthonormalized chart axes
};

/// Chart height h(u,v) and its derivatives up to second order.
struct HeightJet {
    double h = 0, hu = 0, hv = 0, huu = 0, huv = 0, hvv = 0;
};

/// Height jet from the hand-derived per-family expressions.
HeightJet height_jet_closed(const SurfaceSpec& spec, const ChartPoint& cp);

FundamentalForms forms_from_jet(const HeightJet& jet);

FundamentalForms forms_closed(const SurfaceSpec& spec, const ChartPoint& cp);

/// Finite-difference step used by forms_numeric at (u, v).
double fd_step(double u, double v);

/// Oracle path: 6th-order central differences of chart_to_ambient (evaluated in
/// extended precision). Throws MarginTooSmall when the stencil nears the rim.
FundamentalForms forms_numeric(const SurfaceSpec& spec, const ChartPoint& cp);

/// Throws DegenerateMetric when EG - F^2 <= 0.
ShapeOperator shape_operator(const FundamentalForms& ff);

/// Default umbilic tolerance 1e-9 (|k1| + |k2| + 1).
double default_tol_umb(double k1, double k2);

CurvatureSummary curvature_summary(const FundamentalForms& ff);
CurvatureSummary curvature_summary(const SurfaceSpec& spec, const ChartPoint& cp);

double metric_dot(const FundamentalForms& ff, const Vec2& a, const Vec2& b);
double normal_curvature(const FundamentalForms& ff, const Vec2& dir);

struct ConvexityReport {
    double min_K = 0;
    ChartPoint argmin;
    Vec3 argmin_xyz = Vec3::Zero();
    std::size_t samples = 0;
    bool pass = false;
};

/// Samples random chart points (radicand >= kDeltaCover) round-robin over the
/// Monge charts and reports the minimum Gaussian curvature.
ConvexityReport convexity_scan(const SurfaceSpec& spec, std::size_t n_samples, std::uint64_t seed = 1,
                               double threshold = -1e-10);

}  // namespace umb
