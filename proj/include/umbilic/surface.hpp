#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "umbilic/error.hpp"

namespace umb {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class Family { SuperQuadric, PerturbedEllipsoid, Ellipsoid };

struct SuperQuadricParams {
    double a, b, c;
    int k;
    bool operator==(const SuperQuadricParams&) const = default;
};

/// ax^2 + eps x^4 + ay^2 + eps y^4 + bz^2 = 1
struct PerturbedEllipsoidParams {
    double a, b, epsilon;
    bool operator==(const PerturbedEllipsoidParams&) const = default;
};

struct EllipsoidParams {
    double a, b, c;
    bool operator==(const EllipsoidParams&) const = default;
};

/// Radicand floor for a chart point to count as valid.
inline constexpr double kDeltaValid = 1e-12;
/// Margin every surface point is guaranteed to have in at least one atlas chart.
inline constexpr double kDeltaCover = 1e-3;

/**
 * One of the three closed convex surface families.
 *
 * Every family has the separable form sum_i phi_i(x_i) = 1 where each phi_i is
 * an even polynomial with phi_i(0) = 0 and phi_i' > 0 on (0, inf). All chart
 * and derivative code is written against that per-axis term.
 */
class SurfaceSpec {
public:
    static SurfaceSpec super_quadric(double a, double b, double c, int k);
    static SurfaceSpec perturbed_ellipsoid(double a, double b, double epsilon);
    static SurfaceSpec ellipsoid(double a, double b, double c);

    Family family() const noexcept { return family_; }
    const SuperQuadricParams& super_quadric() const;
    const PerturbedEllipsoidParams& perturbed_ellipsoid() const;
    const EllipsoidParams& ellipsoid() const;

    /// Coefficient of the leading even power on `axis` (a, b or c).
    double coefficient(int axis) const;

    /// phi_axis(t)
    template <class T>
    T term(int axis, T t) const;
    /// d phi_axis / dt
    double term_d1(int axis, double t) const;
    /// d^2 phi_axis / dt^2
    double term_d2(int axis, double t) const;

    /// Positive solution h of phi_axis(h) = r for r > 0.
    template <class T>
    T height(int axis, T r) const;

    /// Extent of the surface along an axis (the axis intercept).
    double semi_axis(int axis) const { return height(axis, 1.0); }
    double diameter_estimate() const;

    std::string describe() const;
    bool operator==(const SurfaceSpec&) const = default;

private:
    SurfaceSpec(Family f, std::variant<SuperQuadricParams, PerturbedEllipsoidParams, EllipsoidParams> p)
        : family_(f), params_(p) {}

    Family family_;
    std::variant<SuperQuadricParams, PerturbedEllipsoidParams, EllipsoidParams> params_;
};

double implicit_value(const SurfaceSpec& spec, const Vec3& p);
Vec3 implicit_gradient(const SurfaceSpec& spec, const Vec3& p);

enum class Axis { X = 0, Y = 1, Z = 2 };
enum class Sign { Plus, Minus };
enum class ChartKind { Monge, RotatedEquator };

/**
 * A graph chart over a coordinate plane.
 *
 * Monge charts use cyclic tangential coordinates: X -> (y,z), Y -> (z,x),
 * Z -> (x,y). RotatedEquator charts exist for the perturbed ellipsoid on a
 * quartic axis only; their tangential coordinates are (other quartic axis, z),
 * which is the rotated parameterization whose squared height is Q.
 */
struct ChartId {
    Axis axis = Axis::Z;
    Sign sign = Sign::Plus;
    ChartKind kind = ChartKind::Monge;

    int height_axis() const { return static_cast<int>(axis); }
    std::array<int, 2> tangential_axes() const;
    double sign_value() const { return sign == Sign::Plus ? 1.0 : -1.0; }

    std::string name() const;
    static ChartId parse(const std::string& name);

    auto operator<=>(const ChartId&) const = default;
};

struct ChartPoint {
    ChartId chart;
    double u = 0.0;
    double v = 0.0;
};

/// 1 - phi(u) - phi(v): the quantity the chart height is solved from.
template <class T>
T radicand(const SurfaceSpec& spec, const ChartId& chart, T u, T v);

bool is_valid(const SurfaceSpec& spec, const ChartPoint& cp, double margin = kDeltaValid);

/// Throws InvalidChartPoint when the radicand is below kDeltaValid.
template <class T>
Eigen::Matrix<T, 3, 1> chart_to_ambient_t(const SurfaceSpec& spec, const ChartId& chart, T u, T v);

Vec3 chart_to_ambient(const SurfaceSpec& spec, const ChartPoint& cp);

/// Tangential coordinates of an ambient point in `chart`, if the point lies on
/// the chart's side of the coordinate plane and is valid there.
std::optional<ChartPoint> ambient_to_chart(const SurfaceSpec& spec, const ChartId& chart, const Vec3& p,
                                           double margin = kDeltaValid);

/// Six Monge charts, plus the RotatedEquator pair for the perturbed ellipsoid.
std::vector<ChartId> chart_atlas(const SurfaceSpec& spec);

/// Half-widths of the chart's parameter box (the u and v intercepts).
std::array<double, 2> chart_extent(const SurfaceSpec& spec, const ChartId& chart);

/// Point on the surface along the ray from the origin in direction `dir`.
Vec3 surface_point_along(const SurfaceSpec& spec, const Vec3& dir);

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T ipow(T x, int n) {
    T r = 1;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

template <class T>
T positive_power(T base, T exponent, const char* what) {
    if (!(base > 0)) throw Error(ErrorCode::InvalidChartPoint, std::string("non-positive radicand in ") + what);
    return std::exp(exponent * std::log(base));
}

}  // namespace detail

template <class T>
T SurfaceSpec::term(int axis, T t) const {
    switch (family_) {
    case Family::SuperQuadric: {
        const auto& p = std::get<SuperQuadricParams>(params_);
        return T(coefficient(axis)) * detail::ipow(t, 2 * p.k);
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        const T t2 = t * t;
        if (axis == 2) return T(p.b) * t2;
        return T(p.a) * t2 + T(p.epsilon) * t2 * t2;
    }
    case Family::Ellipsoid:
        return T(coefficient(axis)) * t * t;
    }
    return T(0);
}

template <class T>
T SurfaceSpec::height(int axis, T r) const {
    switch (family_) {
    case Family::SuperQuadric: {
        const auto& p = std::get<SuperQuadricParams>(params_);
        return detail::positive_power<T>(r / T(coefficient(axis)), T(1) / T(2 * p.k), "superquadric height");
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = std::get<PerturbedEllipsoidParams>(params_);
        if (!(r > 0)) throw Error(ErrorCode::InvalidChartPoint, "non-positive radicand in height");
        if (axis == 2) return std::sqrt(r / T(p.b));
        const T a = p.a;
        const T q = T(2) * r / (a + std::sqrt(a * a + T(4) * T(p.epsilon) * r));
        return std::sqrt(q);
    }
    case Family::Ellipsoid:
        if (!(r > 0)) throw Error(ErrorCode::InvalidChartPoint, "non-positive radicand in height");
        return std::sqrt(r / T(coefficient(axis)));
    }
    return T(0);
}

template <class T>
T radicand(const SurfaceSpec& spec, const ChartId& chart, T u, T v) {
    const auto [iu, iv] = chart.tangential_axes();
    return T(1) - spec.term(iu, u) - spec.term(iv, v);
}

template <class T>
Eigen::Matrix<T, 3, 1> chart_to_ambient_t(const SurfaceSpec& spec, const ChartId& chart, T u, T v) {
    const T r = radicand(spec, chart, u, v);
    if (!(r >= T(kDeltaValid)))
        throw Error(ErrorCode::InvalidChartPoint, chart.name() + " radicand below validity floor");
    const auto [iu, iv] = chart.tangential_axes();
    Eigen::Matrix<T, 3, 1> p;
    p[iu] = u;
    p[iv] = v;
    p[chart.height_axis()] = T(chart.sign_value()) * spec.height(chart.height_axis(), r);
    return p;
}

}  // namespace umb
