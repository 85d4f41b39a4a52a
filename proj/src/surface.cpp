#include "umbilic/surface.hpp"

#include <sstream>

namespace umb {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidChartPoint: return "InvalidChartPoint";
    case ErrorCode::MarginTooSmall: return "MarginTooSmall";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::AllCoefficientsZero: return "AllCoefficientsZero";
    case ErrorCode::StartsAtUmbilic: return "StartsAtUmbilic";
    case ErrorCode::NotIsolated: return "NotIsolated";
    case ErrorCode::CircleInvalid: return "CircleInvalid";
    case ErrorCode::NonConvergentLift: return "NonConvergentLift";
    case ErrorCode::MissingIndex: return "MissingIndex";
    }
    return "Unknown";
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

SurfaceSpec SurfaceSpec::super_quadric(double a, double b, double c, int k) {
    if (!positive_finite(a) || !positive_finite(b) || !positive_finite(c))
        throw Error(ErrorCode::InvalidSpec, "superquadric coefficients a, b, c must be positive");
    if (k == 1)
        throw Error(ErrorCode::InvalidSpec, "k = 1 is the classical ellipsoid; use the \"ellipsoid\" family");
    if (k < 2) throw Error(ErrorCode::InvalidSpec, "superquadric exponent k must be an integer >= 2");
    return SurfaceSpec(Family::SuperQuadric, SuperQuadricParams{a, b, c, k});
}

SurfaceSpec SurfaceSpec::perturbed_ellipsoid(double a, double b, double epsilon) {
    if (!positive_finite(a) || !positive_finite(b))
        throw Error(ErrorCode::InvalidSpec, "perturbed ellipsoid coefficients a, b must be positive");
    if (!std::isfinite(epsilon) || epsilon < 0.0)
        throw Error(ErrorCode::InvalidSpec, "perturbed ellipsoid epsilon must be nonnegative");
    return SurfaceSpec(Family::PerturbedEllipsoid, PerturbedEllipsoidParams{a, b, epsilon});
}

SurfaceSpec SurfaceSpec::ellipsoid(double a, double b, double c) {
    if (!positive_finite(a) || !positive_finite(b) || !positive_finite(c))
        throw Error(ErrorCode::InvalidSpec, "ellipsoid coefficients a, b, c must be positive");
    return SurfaceSpec(Family::Ellipsoid, EllipsoidParams{a, b, c});
}

const SuperQuadricParams& SurfaceSpec::super_quadric() const {
    if (family_ != Family::SuperQuadric) throw Error(ErrorCode::NotApplicable, "not a superquadric");
    return std::get<SuperQuadricParams>(params_);
}

const PerturbedEllipsoidParams& SurfaceSpec::perturbed_ellipsoid() const {
    if (family_ != Family::PerturbedEllipsoid) throw Error(ErrorCode::NotApplicable, "not a perturbed ellipsoid");
    return std::get<PerturbedEllipsoidParams>(params_);
}

const EllipsoidParams& SurfaceSpec::ellipsoid() const {
    if (family_ != Family::Ellipsoid) throw Error(ErrorCode::NotApplicable, "not an ellipsoid");
    return std::get<EllipsoidParams>(params_);
}

double SurfaceSpec::coefficient(int axis) const {
    switch (family_) {
    case Family::SuperQuadric: {
        const auto& p = std::get<SuperQuadricParams>(params_);
        return axis == 0 ? p.a : axis == 1 ? p.b : p.c;
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        return axis == 2 ? p.b : p.a;
    }
    case Family::Ellipsoid: {
        const auto& p = std::get<EllipsoidParams>(params_);
        return axis == 0 ? p.a : axis == 1 ? p.b : p.c;
    }
    }
    return 0.0;
}

double SurfaceSpec::term_d1(int axis, double t) const {
    switch (family_) {
    case Family::SuperQuadric: {
        const int k = std::get<SuperQuadricParams>(params_).k;
        return 2.0 * k * coefficient(axis) * detail::ipow(t, 2 * k - 1);
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        if (axis == 2) return 2.0 * p.b * t;
        return 2.0 * p.a * t + 4.0 * p.epsilon * t * t * t;
    }
    case Family::Ellipsoid:
        return 2.0 * coefficient(axis) * t;
    }
    return 0.0;
}

double SurfaceSpec::term_d2(int axis, double t) const {
    switch (family_) {
    case Family::SuperQuadric: {
        const int k = std::get<SuperQuadricParams>(params_).k;
        return 2.0 * k * (2.0 * k - 1.0) * coefficient(axis) * detail::ipow(t, 2 * k - 2);
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        if (axis == 2) return 2.0 * p.b;
        return 2.0 * p.a + 12.0 * p.epsilon * t * t;
    }
    case Family::Ellipsoid:
        return 2.0 * coefficient(axis);
    }
    return 0.0;
}

double SurfaceSpec::diameter_estimate() const {
    return 2.0 * std::max({semi_axis(0), semi_axis(1), semi_axis(2)});
}

std::string SurfaceSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
    case Family::SuperQuadric: {
        const auto& p = std::get<SuperQuadricParams>(params_);
        os << "superquadric(a=" << p.a << ", b=" << p.b << ", c=" << p.c << ", k=" << p.k << ")";
        break;
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        os << "perturbed_ellipsoid(a=" << p.a << ", b=" << p.b << ", epsilon=" << p.epsilon << ")";
        break;
    }
    case Family::Ellipsoid: {
        const auto& p = std::get<EllipsoidParams>(params_);
        os << "ellipsoid(a=" << p.a << ", b=" << p.b << ", c=" << p.c << ")";
        break;
    }
    }
    return os.str();
}

double implicit_value(const SurfaceSpec& spec, const Vec3& p) {
    return spec.term(0, p.x()) + spec.term(1, p.y()) + spec.term(2, p.z()) - 1.0;
}

Vec3 implicit_gradient(const SurfaceSpec& spec, const Vec3& p) {
    return {spec.term_d1(0, p.x()), spec.term_d1(1, p.y()), spec.term_d1(2, p.z())};
}

std::array<int, 2> ChartId::tangential_axes() const {
    if (kind == ChartKind::RotatedEquator) return axis == Axis::Y ? std::array{0, 2} : std::array{1, 2};
    switch (axis) {
    case Axis::X: return {1, 2};
    case Axis::Y: return {2, 0};
    case Axis::Z: return {0, 1};
    }
    return {0, 1};
}

std::string ChartId::name() const {
    std::string s = kind == ChartKind::RotatedEquator ? "Eq" : "";
    s += axis == Axis::X ? "X" : axis == Axis::Y ? "Y" : "Z";
    s += sign == Sign::Plus ? "+" : "-";
    return s;
}

ChartId ChartId::parse(const std::string& name) {
    ChartId id;
    std::string rest = name;
    if (rest.rfind("Eq", 0) == 0) {
        id.kind = ChartKind::RotatedEquator;
        rest = rest.substr(2);
    }
    if (rest.size() != 2) throw Error(ErrorCode::InvalidSpec, "bad chart name '" + name + "'");
    switch (rest[0]) {
    case 'X': case 'x': id.axis = Axis::X; break;
    case 'Y': case 'y': id.axis = Axis::Y; break;
    case 'Z': case 'z': id.axis = Axis::Z; break;
    default: throw Error(ErrorCode::InvalidSpec, "bad chart axis in '" + name + "'");
    }
    if (rest[1] == '+') id.sign = Sign::Plus;
    else if (rest[1] == '-') id.sign = Sign::Minus;
    else throw Error(ErrorCode::InvalidSpec, "bad chart sign in '" + name + "'");
    if (id.kind == ChartKind::RotatedEquator && id.axis == Axis::Z)
        throw Error(ErrorCode::InvalidSpec, "rotated equator charts sit on a quartic axis (X or Y)");
    return id;
}

bool is_valid(const SurfaceSpec& spec, const ChartPoint& cp, double margin) {
    if (cp.chart.kind == ChartKind::RotatedEquator &&
        (spec.family() != Family::PerturbedEllipsoid || cp.chart.axis == Axis::Z))
        return false;
    return radicand(spec, cp.chart, cp.u, cp.v) >= margin;
}

Vec3 chart_to_ambient(const SurfaceSpec& spec, const ChartPoint& cp) {
    if (cp.chart.kind == ChartKind::RotatedEquator &&
        (spec.family() != Family::PerturbedEllipsoid || cp.chart.axis == Axis::Z))
        throw Error(ErrorCode::InvalidChartPoint, "rotated equator chart not defined for " + spec.describe());
    return chart_to_ambient_t<double>(spec, cp.chart, cp.u, cp.v);
}

std::optional<ChartPoint> ambient_to_chart(const SurfaceSpec& spec, const ChartId& chart, const Vec3& p,
                                           double margin) {
    if (chart.sign_value() * p[chart.height_axis()] <= 0.0) return std::nullopt;
    const auto [iu, iv] = chart.tangential_axes();
    ChartPoint cp{chart, p[iu], p[iv]};
    if (!is_valid(spec, cp, margin)) return std::nullopt;
    return cp;
}

std::vector<ChartId> chart_atlas(const SurfaceSpec& spec) {
    std::vector<ChartId> charts;
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
        for (Sign s : {Sign::Plus, Sign::Minus}) charts.push_back({ax, s, ChartKind::Monge});
    if (spec.family() == Family::PerturbedEllipsoid)
        for (Sign s : {Sign::Plus, Sign::Minus}) charts.push_back({Axis::Y, s, ChartKind::RotatedEquator});
    return charts;
}

std::array<double, 2> chart_extent(const SurfaceSpec& spec, const ChartId& chart) {
    const auto [iu, iv] = chart.tangential_axes();
    return {spec.semi_axis(iu), spec.semi_axis(iv)};
}

Vec3 surface_point_along(const SurfaceSpec& spec, const Vec3& dir) {
    const Vec3 d = dir.normalized();
    // f(t d) is increasing in t > 0 from -1; bracket then bisect.
    double lo = 0.0, hi = 1.0;
    while (implicit_value(spec, hi * d) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (implicit_value(spec, mid * d) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * d;
}

}  // namespace umb
