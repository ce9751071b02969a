#include "cobb/tilt_finder.hpp"

#include <algorithm>
#include <cmath>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr double kRootTolerance = 1e-6;
constexpr double kMergeDistance = 1.0;
constexpr double kRefineTolerance = 1e-4;
constexpr double kInvPhi = 0.6180339887498949;

int sign_with_deadband(double v, double eps) {
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

double bisect_root(const CurveFunction& curve, double a, double b) {
  double fa = curve.slope(a);
  while (b - a > kRootTolerance) {
    const double m = 0.5 * (a + b);
    const double fm = curve.slope(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

void split_long(std::vector<Breakpoint>& out, double lo, double hi, double max_interval) {
  if (hi - lo <= max_interval) return;
  const double mid = 0.5 * (lo + hi);
  split_long(out, lo, mid, max_interval);
  out.push_back({mid, BreakpointKind::MidpointSplit});
  split_long(out, mid, hi, max_interval);
}

// |best| is only displaced by a value that is larger beyond rounding noise,
// which keeps the smaller-t tie-break stable for flat derivatives.
bool clearly_greater(double candidate, double best) {
  return candidate > best + 1e-12 * std::max(1.0, best);
}

}  // namespace

std::string_view to_string(BreakpointKind kind) {
  switch (kind) {
    case BreakpointKind::Endpoint: return "endpoint";
    case BreakpointKind::Apex: return "apex";
    case BreakpointKind::MidpointSplit: return "midpoint_split";
  }
  return "unknown";
}

std::vector<std::pair<double, double>> BreakpointSet::intervals() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) out.emplace_back(points[i].t, points[i + 1].t);
  return out;
}

BreakpointSet find_breakpoints(const CurveFunction& curve, const TiltConfig& config) {
  const double lo = curve.lo;
  const double hi = curve.hi;
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "tilt_finder", "empty curve domain");
  if (!(config.max_interval > 0.0)) throw Error(ErrorCode::InvalidArgument, "tilt_finder", "max_interval must be positive");

  std::vector<double> roots;
  double last_t = lo;
  int last_sign = sign_with_deadband(curve.slope(lo), config.slope_eps);
  const auto steps = static_cast<long>(std::ceil(hi - lo));
  for (long k = 1; k <= steps; ++k) {
    const double t = std::min(hi, lo + static_cast<double>(k));
    const int s = sign_with_deadband(curve.slope(t), config.slope_eps);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      const double root = bisect_root(curve, last_t, t);
      const bool near_end = root - lo < kMergeDistance || hi - root < kMergeDistance;
      const bool near_prev = !roots.empty() && root - roots.back() < kMergeDistance;
      if (!near_end && !near_prev) roots.push_back(root);
    }
    last_sign = s;
    last_t = t;
  }

  BreakpointSet set;
  set.points.push_back({lo, BreakpointKind::Endpoint});
  double prev = lo;
  for (double r : roots) {
    split_long(set.points, prev, r, config.max_interval);
    set.points.push_back({r, BreakpointKind::Apex});
    prev = r;
  }
  split_long(set.points, prev, hi, config.max_interval);
  set.points.push_back({hi, BreakpointKind::Endpoint});
  return set;
}

BreakpointSet find_breakpoints(const SpineCurve& curve, const TiltConfig& config) {
  return find_breakpoints(curve.as_function(), config);
}

TiltPoint find_most_tilted(const CurveFunction& curve, double lo, double hi, double grid_step) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "tilt_finder", "interval must satisfy lo < hi");
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "tilt_finder", "grid_step must be positive");
  auto mag = [&](double t) { return std::abs(curve.slope(t)); };

  double best_t = lo;
  double best = mag(lo);
  const auto steps = static_cast<long>(std::ceil((hi - lo) / grid_step));
  for (long k = 1; k <= steps; ++k) {
    const double t = std::min(hi, lo + static_cast<double>(k) * grid_step);
    const double v = mag(t);
    if (clearly_greater(v, best)) {
      best = v;
      best_t = t;
    }
  }

  // Golden-section search for the maximum in the neighbouring grid cells.
  double a = std::max(lo, best_t - grid_step);
  double b = std::min(hi, best_t + grid_step);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = mag(x1);
  double f2 = mag(x2);
  while (b - a > kRefineTolerance) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = mag(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = mag(x2);
    }
  }
  const double refined_t = 0.5 * (a + b);
  if (clearly_greater(mag(refined_t), best)) best_t = refined_t;

  return TiltPoint{best_t, curve.slope(best_t), lo, hi};
}

TiltPoint find_most_tilted(const SpineCurve& curve, double lo, double hi, double grid_step) {
  return find_most_tilted(curve.as_function(), lo, hi, grid_step);
}

std::vector<TiltPoint> find_tilt_points(const CurveFunction& curve, const BreakpointSet& breakpoints,
                                        const TiltConfig& config) {
  std::vector<TiltPoint> out;
  for (const auto& [lo, hi] : breakpoints.intervals()) out.push_back(find_most_tilted(curve, lo, hi, config.grid_step));
  return out;
}

}  // namespace cobb
