#pragma once

#include <string>
#include <utility>
#include <vector>

#include "umbilic/line_field.hpp"

namespace umb {

enum class StopReason { LengthReached, NearUmbilic, ChartBoundary, StepUnderflow };

std::string to_string(StopReason reason);

struct TraceConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double min_step = 1e-12;
    double max_step = 1e-2;
    double umb_stop = 1e-6;    ///< stop once umbilic_residual drops below this
    double res_bound = 1e-5;
    double excursion = 0.02;   ///< fraction of steps allowed at or above res_bound
    bool reverse = false;      ///< start against the branch direction
    double tol_find = 1e-10;   ///< starts with residual <= 10 tol_find are umbilic
};

/// A line of curvature in one chart. points[0] is the start; residuals[i]
/// belongs to the step from points[i] to points[i+1].
struct CurveTrace {
    std::vector<ChartPoint> points;
    std::vector<double> arclength;  ///< ambient arclength at each point
    std::vector<double> residuals;
    StopReason stop_reason = StopReason::LengthReached;
    int branch = 0;

    double max_residual() const;
    /// Fraction of steps whose residual is at or above `bound`.
    double excursion_fraction(double bound) const;
};

/// Adaptive Dormand-Prince 5(4) integration of the unit-speed principal
/// direction field. Throws StartsAtUmbilic or InvalidChartPoint.
CurveTrace trace_line(const SurfaceSpec& spec, const ChartPoint& start, int branch, double arclen_max,
                      const TraceConfig& cfg = {});

/// (arclength at the step end, log10 residual) per step.
std::vector<std::pair<double, double>> residual_log(const CurveTrace& trace);

/// Residuals stay below res_bound except on at most `excursion` of the steps.
bool within_residual_bound(const CurveTrace& trace, const TraceConfig& cfg = {});

/// CSV with columns arclength,u,v,x,y,z,residual (residual of the step ending at the row; 0 on the first row).
std::string trace_csv(const SurfaceSpec& spec, const CurveTrace& trace);

}  // namespace umb
