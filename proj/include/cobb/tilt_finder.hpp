#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "cobb/centerline.hpp"

namespace cobb {

struct TiltConfig {
  double max_interval = 250.0;  // normalized px; longer intervals are bisected
  double grid_step = 0.5;       // scan step for the |f'| maximum
  double slope_eps = 1e-6;      // |f'| below this counts as zero when scanning for apexes
};

enum class BreakpointKind { Endpoint, Apex, MidpointSplit };

std::string_view to_string(BreakpointKind kind);

struct Breakpoint {
  double t = 0.0;
  BreakpointKind kind = BreakpointKind::Endpoint;
};

struct BreakpointSet {
  std::vector<Breakpoint> points;  // strictly increasing, endpoints first and last

  std::vector<std::pair<double, double>> intervals() const;
};

struct TiltPoint {
  double t_star = 0.0;
  double slope = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

/// Domain endpoints, the interior sign changes of f' (apexes) and midpoint
/// splits of any interval longer than max_interval. Roots are found on a
/// 1-px grid, refined by bisection to 1e-6 and merged when within 1 px of
/// each other or of an endpoint.
BreakpointSet find_breakpoints(const CurveFunction& curve, const TiltConfig& config = {});
BreakpointSet find_breakpoints(const SpineCurve& curve, const TiltConfig& config = {});

/// argmax of |f'| over the closed interval: grid scan then golden-section
/// refinement to 1e-4. Ties go to the smaller t.
TiltPoint find_most_tilted(const CurveFunction& curve, double lo, double hi, double grid_step = 0.5);
TiltPoint find_most_tilted(const SpineCurve& curve, double lo, double hi, double grid_step = 0.5);

/// One TiltPoint per breakpoint interval, cranial to caudal.
std::vector<TiltPoint> find_tilt_points(const CurveFunction& curve, const BreakpointSet& breakpoints,
                                        const TiltConfig& config = {});

}  // namespace cobb
