#include "umbilic/forms.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include <Eigen/Geometry>

namespace umb {

namespace {

// Superquadric Monge patch h = (R/ch)^{1/2k}, R = 1 - cu u^{2k} - cv v^{2k}.
HeightJet super_quadric_jet(double cu, double cv, double ch, int k, double u, double v) {
    using detail::ipow;
    using detail::positive_power;
    const double m = 1.0 / (2.0 * k);
    const double r = 1.0 - cu * ipow(u, 2 * k) - cv * ipow(v, 2 * k);
    const double chm = std::pow(ch, -m);
    const double r_m1 = positive_power(r, m - 1.0, "superquadric jet");
    const double r_m2 = r_m1 / r;
    const double twok1 = 2.0 * k - 1.0;

    HeightJet j;
    j.h = chm * positive_power(r, m, "superquadric jet");
    j.hu = -cu * chm * ipow(u, 2 * k - 1) * r_m1;
    j.hv = -cv * chm * ipow(v, 2 * k - 1) * r_m1;
    j.huu = -twok1 * cu * chm * ipow(u, 2 * k - 2) * (1.0 - cv * ipow(v, 2 * k)) * r_m2;
    j.hvv = -twok1 * cv * chm * ipow(v, 2 * k - 2) * (1.0 - cu * ipow(u, 2 * k)) * r_m2;
    j.huv = -twok1 * cu * cv * chm * ipow(u, 2 * k - 1) * ipow(v, 2 * k - 1) * r_m2;
    return j;
}

// Perturbed ellipsoid over the z = 0 plane: h = b^{-1/2} R^{1/2}.
HeightJet perturbed_z_jet(const PerturbedEllipsoidParams& p, double u, double v) {
    const double a = p.a, eps = p.epsilon;
    const double r = 1.0 - a * u * u - eps * u * u * u * u - a * v * v - eps * v * v * v * v;
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidChartPoint, "non-positive radicand in perturbed jet");
    const double bs = 1.0 / std::sqrt(p.b);
    const double pu = a * u + 2.0 * eps * u * u * u;
    const double pv = a * v + 2.0 * eps * v * v * v;
    const double r12 = std::sqrt(r);
    const double r32 = r * r12;

    HeightJet j;
    j.h = bs * r12;
    j.hu = -bs * pu / r12;
    j.hv = -bs * pv / r12;
    j.huu = -bs * (pu * pu / r32 + (a + 6.0 * eps * u * u) / r12);
    j.hvv = -bs * (pv * pv / r32 + (a + 6.0 * eps * v * v) / r12);
    j.huv = -bs * pu * pv / r32;
    return j;
}

// Graph over a quartic axis: h = Q^{1/2} with aQ + eps Q^2 = R.
// pu, pv are half the derivatives of the tangential terms; dpu, dpv their
// derivatives. With D = a + 2 eps Q = sqrt(a^2 + 4 eps R), Q_u = -2 pu / D.
HeightJet quartic_graph_jet(double a, double eps, double r, double pu, double pv, double dpu, double dpv) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidChartPoint, "non-positive radicand in Q-chart jet");
    const double d = std::sqrt(a * a + 4.0 * eps * r);
    const double q = 2.0 * r / (a + d);
    const double sq = std::sqrt(q);
    const double q32 = q * sq;
    const double bend = 1.0 + 4.0 * eps * q / d;

    HeightJet j;
    j.h = sq;
    j.hu = -pu / (d * sq);
    j.hv = -pv / (d * sq);
    j.huu = -pu * pu / (d * d * q32) * bend - dpu / (d * sq);
    j.hvv = -pv * pv / (d * d * q32) * bend - dpv / (d * sq);
    j.huv = -pu * pv / (d * d * q32) * bend;
    return j;
}

// Classical ellipsoid Monge patch: ch h^2 = 1 - cu u^2 - cv v^2.
HeightJet ellipsoid_jet(double cu, double cv, double ch, double u, double v) {
    const double r = 1.0 - cu * u * u - cv * v * v;
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidChartPoint, "non-positive radicand in ellipsoid jet");
    HeightJet j;
    j.h = std::sqrt(r / ch);
    const double h3 = j.h * j.h * j.h;
    j.hu = -cu * u / (ch * j.h);
    j.hv = -cv * v / (ch * j.h);
    j.huu = -cu / (ch * j.h) - cu * cu * u * u / (ch * ch * h3);
    j.hvv = -cv / (ch * j.h) - cv * cv * v * v / (ch * ch * h3);
    j.huv = -cu * cv * u * v / (ch * ch * h3);
    return j;
}

}  // namespace

HeightJet height_jet_closed(const SurfaceSpec& spec, const ChartPoint& cp) {
    if (!is_valid(spec, cp)) throw Error(ErrorCode::InvalidChartPoint, "chart point " + cp.chart.name() + " outside domain");
    const auto [iu, iv] = cp.chart.tangential_axes();
    const int ih = cp.chart.height_axis();
    switch (spec.family()) {
    case Family::SuperQuadric:
        return super_quadric_jet(spec.coefficient(iu), spec.coefficient(iv), spec.coefficient(ih),
                                 spec.super_quadric().k, cp.u, cp.v);
    case Family::PerturbedEllipsoid: {
        const auto& p = spec.perturbed_ellipsoid();
        if (ih == 2) return perturbed_z_jet(p, cp.u, cp.v);
        const double r = radicand(spec, cp.chart, cp.u, cp.v);
        return quartic_graph_jet(p.a, p.epsilon, r, 0.5 * spec.term_d1(iu, cp.u), 0.5 * spec.term_d1(iv, cp.v),
                                 0.5 * spec.term_d2(iu, cp.u), 0.5 * spec.term_d2(iv, cp.v));
    }
    case Family::Ellipsoid:
        return ellipsoid_jet(spec.coefficient(iu), spec.coefficient(iv), spec.coefficient(ih), cp.u, cp.v);
    }
    return {};
}

FundamentalForms forms_from_jet(const HeightJet& j) {
    const double w = std::sqrt(1.0 + j.hu * j.hu + j.hv * j.hv);
    FundamentalForms ff;
    ff.E = 1.0 + j.hu * j.hu;
    ff.F = j.hu * j.hv;
    ff.G = 1.0 + j.hv * j.hv;
    ff.e = -j.huu / w;
    ff.f = -j.huv / w;
    ff.g = -j.hvv / w;
    return ff;
}

FundamentalForms forms_closed(const SurfaceSpec& spec, const ChartPoint& cp) {
    return forms_from_jet(height_jet_closed(spec, cp));
}

double fd_step(double u, double v) {
    static const double base = std::pow(static_cast<double>(std::numeric_limits<long double>::epsilon()), 1.0 / 6.0);
    return base * (1.0 + std::abs(u) + std::abs(v));
}

FundamentalForms forms_numeric(const SurfaceSpec& spec, const ChartPoint& cp) {
    using Ld = long double;
    using V3 = Eigen::Matrix<Ld, 3, 1>;
    if (!is_valid(spec, cp)) throw Error(ErrorCode::InvalidChartPoint, "chart point " + cp.chart.name() + " outside domain");
    const double h_nominal = fd_step(cp.u, cp.v);
    const double r0 = radicand(spec, cp.chart, cp.u, cp.v);
    if (r0 < 10.0 * h_nominal)
        throw Error(ErrorCode::MarginTooSmall, "finite-difference stencil too close to the chart rim");
    // The height varies on a length scale of roughly the radicand near the rim.
    const double h = h_nominal * std::min(1.0, r0);

    const Ld u0 = cp.u, v0 = cp.v, hl = h;
    auto at = [&](int i, int j) -> V3 {
        const Ld u = u0 + i * hl, v = v0 + j * hl;
        if (radicand<Ld>(spec, cp.chart, u, v) < Ld(kDeltaValid))
            throw Error(ErrorCode::MarginTooSmall, "finite-difference stencil leaves the chart");
        return chart_to_ambient_t<Ld>(spec, cp.chart, u, v);
    };

    static constexpr Ld d1[7] = {-1.0L / 60, 3.0L / 20, -3.0L / 4, 0, 3.0L / 4, -3.0L / 20, 1.0L / 60};
    static constexpr Ld d2[7] = {1.0L / 90, -3.0L / 20, 3.0L / 2, -49.0L / 18, 3.0L / 2, -3.0L / 20, 1.0L / 90};

    V3 su = V3::Zero(), sv = V3::Zero(), suu = V3::Zero(), svv = V3::Zero(), suv = V3::Zero();
    std::array<std::array<V3, 7>, 7> grid;
    for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j) grid[i + 3][j + 3] = at(i, j);
    for (int i = 0; i < 7; ++i) {
        su += d1[i] * grid[i][3];
        sv += d1[i] * grid[3][i];
        suu += d2[i] * grid[i][3];
        svv += d2[i] * grid[3][i];
        for (int j = 0; j < 7; ++j) suv += d1[i] * d1[j] * grid[i][j];
    }
    su /= hl;
    sv /= hl;
    suu /= hl * hl;
    svv /= hl * hl;
    suv /= hl * hl;

    V3 n = su.cross(sv);
    n /= n.norm();
    if (n.dot(grid[3][3]) > 0) n = -n;  // inward

    FundamentalForms ff;
    ff.E = static_cast<double>(su.dot(su));
    ff.F = static_cast<double>(su.dot(sv));
    ff.G = static_cast<double>(sv.dot(sv));
    ff.e = static_cast<double>(n.dot(suu));
    ff.f = static_cast<double>(n.dot(suv));
    ff.g = static_cast<double>(n.dot(svv));
    return ff;
}

ShapeOperator shape_operator(const FundamentalForms& ff) {
    const double det = ff.metric_det();
    if (!(det > 0.0)) throw Error(ErrorCode::DegenerateMetric, "EG - F^2 <= 0");
    ShapeOperator s;
    s.c00 = (ff.G * ff.e - ff.F * ff.f) / det;
    s.c01 = (ff.G * ff.f - ff.F * ff.g) / det;
    s.c10 = (ff.E * ff.f - ff.e * ff.F) / det;
    s.c11 = (ff.E * ff.g - ff.F * ff.f) / det;
    return s;
}

double default_tol_umb(double k1, double k2) { return 1e-9 * (std::abs(k1) + std::abs(k2) + 1.0); }

double metric_dot(const FundamentalForms& ff, const Vec2& a, const Vec2& b) {
    return ff.E * a.x() * b.x() + ff.F * (a.x() * b.y() + a.y() * b.x()) + ff.G * a.y() * b.y();
}

double normal_curvature(const FundamentalForms& ff, const Vec2& d) {
    const double num = ff.e * d.x() * d.x() + 2.0 * ff.f * d.x() * d.y() + ff.g * d.y() * d.y();
    return num / metric_dot(ff, d, d);
}

namespace {

Vec2 metric_normalized(const FundamentalForms& ff, const Vec2& d) { return d / std::sqrt(metric_dot(ff, d, d)); }

// I-orthogonal complement of w, I-normalized.
Vec2 metric_perp(const FundamentalForms& ff, const Vec2& w) {
    return metric_normalized(ff, Vec2(-(ff.F * w.x() + ff.G * w.y()), ff.E * w.x() + ff.F * w.y()));
}

}  // namespace

CurvatureSummary curvature_summary(const FundamentalForms& ff) {
    const ShapeOperator s = shape_operator(ff);
    CurvatureSummary cs;
    cs.K = (ff.e * ff.g - ff.f * ff.f) / ff.metric_det();
    cs.H = 0.5 * s.trace();
    const double half_gap = 0.5 * (s.c00 - s.c11);
    const double disc = std::sqrt(std::max(half_gap * half_gap + s.c01 * s.c10, 0.0));
    cs.k1 = cs.H + disc;
    cs.k2 = cs.H - disc;

    if (cs.k1 - cs.k2 < default_tol_umb(cs.k1, cs.k2)) {
        cs.degenerate = true;
        cs.dir1 = metric_normalized(ff, Vec2(1, 0));
        cs.dir2 = metric_perp(ff, cs.dir1);
        return cs;
    }
    // (C - k1) w = 0: take whichever row gives the better-conditioned null vector.
    const Vec2 r0(s.c01, cs.k1 - s.c00);
    const Vec2 r1(cs.k1 - s.c11, s.c10);
    cs.dir1 = metric_normalized(ff, r0.squaredNorm() >= r1.squaredNorm() ? r0 : r1);
    cs.dir2 = metric_perp(ff, cs.dir1);
    return cs;
}

CurvatureSummary curvature_summary(const SurfaceSpec& spec, const ChartPoint& cp) {
    return curvature_summary(forms_closed(spec, cp));
}

ConvexityReport convexity_scan(const SurfaceSpec& spec, std::size_t n_samples, std::uint64_t seed,
                               double threshold) {
    if (n_samples == 0) throw Error(ErrorCode::InvalidSpec, "convexity scan needs at least one sample");
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::vector<ChartId> charts;
    for (const auto& c : chart_atlas(spec))
        if (c.kind == ChartKind::Monge) charts.push_back(c);

    ConvexityReport rep;
    rep.min_K = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
        const ChartId& chart = charts[i % charts.size()];
        const auto ext = chart_extent(spec, chart);
        ChartPoint cp{chart, 0, 0};
        do {
            cp.u = (2.0 * unit() - 1.0) * ext[0];
            cp.v = (2.0 * unit() - 1.0) * ext[1];
        } while (!is_valid(spec, cp, kDeltaCover));
        const FundamentalForms ff = forms_closed(spec, cp);
        const double K = (ff.e * ff.g - ff.f * ff.f) / ff.metric_det();
        if (K < rep.min_K) {
            rep.min_K = K;
            rep.argmin = cp;
        }
    }
    rep.samples = n_samples;
    rep.argmin_xyz = chart_to_ambient(spec, rep.argmin);
    rep.pass = rep.min_K >= threshold;
    return rep;
}

}  // namespace umb
