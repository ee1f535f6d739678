#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nhse/dynamics.hpp"

namespace nhse::analysis {

struct TimeWindow {
    double lo = 0.0;
    double hi = 0.0;
};

enum class ParabolaForm {
    pure,        ///< n_CM = c t^2
    with_cubic,  ///< n_CM = c t^2 + d t^3, d a nuisance parameter
};

/// Least-squares fit result. For parabola fits `coefficient` is the
/// acceleration a = 2c (second derivative of c t^2); for drift fits it is
/// the slope v.
struct FitReport {
    double coefficient = 0.0;
    double residual_rms = 0.0;
    TimeWindow window;
    int n_points = 0;
    double quadratic = 0.0;  ///< c (parabola fits only)
    double cubic = 0.0;      ///< d (with_cubic only)
    bool past_regime = false;  ///< residual_rms > max(0.1 |c| t_hi^2, 1e-12)
    std::string convention;
};

/// Fits n_CM(t) ~ c t^2 (+ d t^3) with no constant or linear term over the
/// samples in `window`. Rejects windows holding fewer than 3 samples.
FitReport fit_parabola(const ComTrajectory& traj, TimeWindow window, ParabolaForm form = ParabolaForm::pure);

/// Slope of n_CM vs t over a late window (window.lo >= 0.5 t_max).
FitReport fit_drift(const ComTrajectory& traj, TimeWindow window);

/// Central second differences (n_{i+1} - 2 n_i + n_{i-1}) / dt^2, endpoints
/// omitted. Requires uniformly spaced times.
std::vector<std::pair<double, double>> finite_difference_accel(const ComTrajectory& traj);

/// Signed polygon area sum_edges (y_j + y_{j+1})/2 (x_{j+1} - x_j) with x = Re z,
/// y = Im z, i.e. the discrete loop integral of E_I dE_R. Counterclockwise
/// loops give negative values. Self-intersecting loops sum their lobes with
/// sign.
double shoelace_area(std::span<const cplx> polygon);

/// Winding number of the closed polygon around z.
int winding_number(cplx z, std::span<const cplx> polygon);

/// Distance from z to the closed polyline.
double distance_to_polyline(cplx z, std::span<const cplx> polygon);

/// Nonzero winding and farther than `edge_tolerance` from every edge.
bool strictly_inside(cplx z, std::span<const cplx> polygon, double edge_tolerance = 1e-6);

/// Nonzero winding or within `edge_tolerance` of an edge.
bool inside_or_on(cplx z, std::span<const cplx> polygon, double edge_tolerance = 1e-6);

/// sup over points of the distance to the polyline.
double directed_distance(std::span<const cplx> points, std::span<const cplx> polygon);

}  // namespace nhse::analysis
