#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobb/centerline.hpp"
#include "cobb/config.hpp"
#include "cobb/mask_io.hpp"
#include "cobb/tilt_finder.hpp"

namespace cobb {

/// Deviation of the spine axis from the image vertical, in degrees, and the
/// window [window_lo, window_hi] whose mean slope produced it.
struct DirectionAngle {
  double theta_deg = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct DirectedTilt {
  TiltPoint tilt;
  DirectionAngle direction;
};

struct CobbMeasurement {
  double angle_deg = 0.0;
  DirectedTilt upper;
  DirectedTilt lower;
  bool is_main = false;
};

struct SeverityGrade {
  static constexpr std::array<double, 4> kThresholds{10.0, 25.0, 45.0, 60.0};
  int level = 0;
};

/// Geometry needed to map normalized curve coordinates back onto the
/// original image: row = roi.top + t_origin + t / scale_factor, and
/// col = roi.left + x_center + x / scale_factor.
struct CaseFrame {
  int image_width = 0;
  int image_height = 0;
  RoiBox roi;
  double t_origin = 0.0;
  double x_center = 0.0;
  double scale_factor = 1.0;

  double row_of(double t) const { return roi.top + t_origin + t / scale_factor; }
  double col_of(double x) const { return roi.left + x_center + x / scale_factor; }
};

struct CaseResult {
  std::string source_id;
  CaseFrame frame;
  std::size_t centerline_points = 0;
  std::size_t discarded_components = 0;
  SpineCurve curve;
  BreakpointSet breakpoints;
  std::vector<DirectedTilt> tilts;
  std::vector<CobbMeasurement> measurements;  // cranial to caudal
  double main_angle_deg = 0.0;
  std::size_t main_index = 0;
  SeverityGrade grade;
  PipelineConfig config;
};

/// L_t = tolerance_fraction * interval length; the slope is averaged over a
/// window of length L_t centred on t_star and clipped to the interval. The
/// mean of f' over [a, b] is (f(b) - f(a)) / (b - a). A zero-length window
/// falls back to f'(t_star).
DirectionAngle vertebra_direction(const CurveFunction& curve, const TiltPoint& tilt, double tolerance_fraction = 0.15);
DirectionAngle vertebra_direction(const SpineCurve& curve, const TiltPoint& tilt, double tolerance_fraction = 0.15);

/// One angle per adjacent pair of tilt points, |theta_k - theta_k+1|.
std::vector<CobbMeasurement> measure_cobb_angles(const CurveFunction& curve, const std::vector<TiltPoint>& tilts,
                                                 double tolerance_fraction = 0.15);
std::vector<CobbMeasurement> measure_cobb_angles(const SpineCurve& curve, const std::vector<TiltPoint>& tilts,
                                                 double tolerance_fraction = 0.15);

/// Flags the largest angle as main (the most cranial one on ties) and
/// returns its index.
std::size_t main_cobb(std::vector<CobbMeasurement>& measurements);

/// Level 0 below 10 deg, then [10, 25) -> 1, [25, 45) -> 2, [45, 60) -> 3, >= 60 -> 4.
SeverityGrade grade_severity(double angle_deg);

/// validate -> crop -> centerline -> normalize -> fit -> breakpoints ->
/// tilt points -> directions -> angles -> main -> grade.
CaseResult measure_image(const SpineMask& mask, const PipelineConfig& config = {});

nlohmann::json to_json(const CaseResult& result);

}  // namespace cobb
