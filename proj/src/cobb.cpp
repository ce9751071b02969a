#include "cobb/cobb.hpp"

#include <cmath>
#include <numbers>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "cobb";

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

}  // namespace

DirectionAngle vertebra_direction(const CurveFunction& curve, const TiltPoint& tilt, double tolerance_fraction) {
  const double lt = tolerance_fraction * (tilt.interval_hi - tilt.interval_lo);
  DirectionAngle out;
  out.window_lo = std::max(tilt.interval_lo, tilt.t_star - 0.5 * lt);
  out.window_hi = std::min(tilt.interval_hi, tilt.t_star + 0.5 * lt);
  double mean_slope = 0.0;
  if (out.window_hi > out.window_lo) {
    mean_slope = (curve.value(out.window_hi) - curve.value(out.window_lo)) / (out.window_hi - out.window_lo);
  } else {
    out.window_lo = out.window_hi = tilt.t_star;
    mean_slope = curve.slope(tilt.t_star);
  }
  out.theta_deg = degrees(std::atan(mean_slope));
  return out;
}

DirectionAngle vertebra_direction(const SpineCurve& curve, const TiltPoint& tilt, double tolerance_fraction) {
  return vertebra_direction(curve.as_function(), tilt, tolerance_fraction);
}

std::vector<CobbMeasurement> measure_cobb_angles(const CurveFunction& curve, const std::vector<TiltPoint>& tilts,
                                                 double tolerance_fraction) {
  if (tilts.size() < 2) {
    throw Error(ErrorCode::NoAngleMeasurable, kStage,
                "need at least two tilt points, got " + std::to_string(tilts.size()));
  }
  std::vector<DirectedTilt> directed;
  directed.reserve(tilts.size());
  for (const auto& tp : tilts) directed.push_back({tp, vertebra_direction(curve, tp, tolerance_fraction)});

  std::vector<CobbMeasurement> out;
  out.reserve(tilts.size() - 1);
  for (std::size_t k = 0; k + 1 < directed.size(); ++k) {
    const double angle = std::abs(directed[k].direction.theta_deg - directed[k + 1].direction.theta_deg);
    out.push_back({angle, directed[k], directed[k + 1], false});
  }
  return out;
}

std::vector<CobbMeasurement> measure_cobb_angles(const SpineCurve& curve, const std::vector<TiltPoint>& tilts,
                                                 double tolerance_fraction) {
  return measure_cobb_angles(curve.as_function(), tilts, tolerance_fraction);
}

std::size_t main_cobb(std::vector<CobbMeasurement>& measurements) {
  if (measurements.empty()) throw Error(ErrorCode::NoAngleMeasurable, kStage, "no Cobb measurements");
  std::size_t best = 0;
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    measurements[i].is_main = false;
    if (measurements[i].angle_deg > measurements[best].angle_deg) best = i;
  }
  measurements[best].is_main = true;
  return best;
}

SeverityGrade grade_severity(double angle_deg) {
  if (!std::isfinite(angle_deg) || angle_deg < 0.0) {
    throw Error(ErrorCode::InvalidAngle, kStage, "angle must be finite and non-negative");
  }
  SeverityGrade g;
  for (double threshold : SeverityGrade::kThresholds) {
    if (angle_deg >= threshold) ++g.level;
  }
  return g;
}

CaseResult measure_image(const SpineMask& mask, const PipelineConfig& config) {
  config.validate();
  CaseResult result;
  result.source_id = mask.source_id();
  result.config = config;
  result.frame.image_width = mask.width();
  result.frame.image_height = mask.height();

  const ValidatedMask valid = validate_mask(mask, config.min_area);
  result.discarded_components = valid.discarded_components;
  const CroppedMask cropped = crop_to_roi(valid.mask);
  result.frame.roi = cropped.box;

  const CenterlinePolyline line = extract_centerline(cropped.mask);
  result.centerline_points = line.points.size();
  const NormalizedCenterline normalized = normalize_centerline(line, config.normalized_length);
  result.frame.t_origin = normalized.t_origin;
  result.frame.x_center = normalized.x_center;
  result.frame.scale_factor = normalized.scale_factor;

  result.curve = fit_curve(normalized, config.max_degree);
  const CurveFunction fn = result.curve.as_function();
  result.breakpoints = find_breakpoints(fn, config.tilt());
  const std::vector<TiltPoint> tilts = find_tilt_points(fn, result.breakpoints, config.tilt());

  result.measurements = measure_cobb_angles(fn, tilts, config.tolerance_fraction);
  result.tilts.reserve(tilts.size());
  for (std::size_t k = 0; k < result.measurements.size(); ++k) {
    result.tilts.push_back(result.measurements[k].upper);
    if (k + 1 == result.measurements.size()) result.tilts.push_back(result.measurements[k].lower);
  }
  result.main_index = main_cobb(result.measurements);
  result.main_angle_deg = result.measurements[result.main_index].angle_deg;
  result.grade = grade_severity(result.main_angle_deg);
  return result;
}

nlohmann::json to_json(const CaseResult& result) {
  using nlohmann::json;
  auto end_json = [](const DirectedTilt& d) {
    return json{{"t", d.tilt.t_star}, {"theta_deg", d.direction.theta_deg}};
  };
  json measurements = json::array();
  for (const auto& m : result.measurements) {
    measurements.push_back(
        {{"angle_deg", m.angle_deg}, {"upper", end_json(m.upper)}, {"lower", end_json(m.lower)}, {"is_main", m.is_main}});
  }
  json breakpoints = json::array();
  for (const auto& b : result.breakpoints.points) {
    breakpoints.push_back({{"t", b.t}, {"kind", std::string(to_string(b.kind))}});
  }
  json tilts = json::array();
  for (const auto& d : result.tilts) {
    tilts.push_back({{"t", d.tilt.t_star},
                     {"slope", d.tilt.slope},
                     {"theta_deg", d.direction.theta_deg},
                     {"interval", {d.tilt.interval_lo, d.tilt.interval_hi}},
                     {"window", {d.direction.window_lo, d.direction.window_hi}}});
  }
  const auto& f = result.frame;
  return json{
      {"source_id", result.source_id},
      {"main_angle_deg", result.main_angle_deg},
      {"grade", result.grade.level},
      {"measurements", measurements},
      {"breakpoints", breakpoints},
      {"tilt_points", tilts},
      {"curve",
       {{"degree", result.curve.degree()},
        {"coefficients", result.curve.coefficients()},
        {"rms_residual", result.curve.rms_residual()}}},
      {"frame",
       {{"image_width", f.image_width},
        {"image_height", f.image_height},
        {"roi", {{"top", f.roi.top}, {"left", f.roi.left}, {"bottom", f.roi.bottom}, {"right", f.roi.right}}},
        {"t_origin", f.t_origin},
        {"x_center", f.x_center},
        {"scale_factor", f.scale_factor}}},
      {"centerline_points", result.centerline_points},
      {"discarded_components", result.discarded_components},
      {"config", to_json(result.config)},
  };
}

}  // namespace cobb
