#pragma once

#include <optional>
#include <vector>

#include "umbilic/forms.hpp"

namespace umb {

/// Coefficients of A du^2 + B du dv + C dv^2 = 0, whose root directions are
/// the principal directions, and those directions I-normalized and ordered by
/// chart angle in [0, pi).
struct DirectionPair {
    double A = 0, B = 0, C = 0;
    std::vector<Vec2> dirs;

    /// |A du^2 + B du dv + C dv^2| / (|A| + |B| + |C|) for an I-unit direction.
    double residual(const FundamentalForms& ff, const Vec2& d) const;
};

/// Never throws; dirs is empty when A = B = C = 0.
DirectionPair principal_quadratic(const FundamentalForms& ff);

/// Throws AllCoefficientsZero when |A|, |B|, |C| are all below tol_umb times
/// the coefficient scale (E + G)(1 + |e| + |f| + |g|).
DirectionPair principal_quadratic(const SurfaceSpec& spec, const ChartPoint& cp);

/// Chart angle in [0, pi) of the larger-curvature principal direction, or
/// nullopt where the two normal curvatures agree to `rel_tol` (relative).
std::optional<double> major_direction_angle(const FundamentalForms& ff, double rel_tol = 1e-9);

/// (M00 - M11, 2 M01) for the second form M in the I-orthonormal frame built
/// on the chart u-axis; its polar angle is twice the angle of the
/// larger-curvature direction and it vanishes exactly at umbilics.
Vec2 doubled_angle_vector(const FundamentalForms& ff);

struct WindingResult {
    int twice_index = 0;
    int samples = 0;
    double max_jump = 0;  ///< radians, over resolved steps
    double radius = 0;    ///< chart units
    int thin_layers = 0;  ///< transitions narrower than rounding-level arcs

    double index() const { return 0.5 * twice_index; }
};

/// Winding of the principal line field (angle mod pi) around a counterclockwise
/// chart circle. Sampling doubles up to 16x until every step of the lift moves
/// less than pi/4; steps that still jump are then bisected adaptively.
/// Throws CircleInvalid or NonConvergentLift.
WindingResult line_field_winding(const SurfaceSpec& spec, const ChartId& chart, const Vec2& center,
                                 double radius, int samples);

}  // namespace umb
