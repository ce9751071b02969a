#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cobb/config.hpp"
#include "cobb/mask_io.hpp"

namespace cobb {

enum class CurveFamily { Line, Arc, Sinusoid, DoubleSinusoid };

std::string_view to_string(CurveFamily family);
CurveFamily parse_curve_family(std::string_view name);

/// Parametric spine centre x = g(s), s = row - top in [0, spine_length].
///   line            cx + slope * (s - L/2)
///   arc             circle of `radius` whose chord is the vertical segment s in [0, L]
///   sinusoid        cx + amplitude * sin(2 pi s / period + phase)
///   double_sinusoid sinusoid + amplitude2 * sin(2 pi s / period2 + phase2)
struct SynthParams {
  std::string name = "synth";
  CurveFamily family = CurveFamily::Sinusoid;
  double amplitude = 30.0;
  double period = 572.0;
  double phase = 0.0;
  double slope = 0.0;
  double radius = 0.0;
  double amplitude2 = 0.0;
  double period2 = 0.0;
  double phase2 = 0.0;
  int half_width = 12;
  int spine_length = 640;
  int margin = 30;
  int width = 0;   // 0 picks a width that fits the band plus margins
  int height = 0;  // 0 means spine_length + 1 + 2 * margin
  double noise_px = 0.0;

  int raster_width() const;
  int raster_height() const;
  int top_row() const;

  /// Band centre column at spine row s.
  double center(double s) const;
  /// g(s) minus the raster's centre column.
  double lateral(double s) const;
  double center_slope(double s) const;
  double center_curvature(double s) const;
};

struct OracleTilt {
  double t = 0.0;
  double slope = 0.0;
  double theta_deg = 0.0;            // window-averaged direction
  double pointwise_theta_deg = 0.0;  // arctan of the slope at t
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

struct OracleBreakpoint {
  double t = 0.0;
  std::string kind;
};

/// Closed-form reference measurements in the normalized frame.
struct OracleRecord {
  std::vector<OracleBreakpoint> breakpoints;
  std::vector<OracleTilt> tilt_points;
  std::vector<double> cobb_angles_deg;
  double main_angle_deg = 0.0;
  std::size_t main_index = 0;
};

struct SynthCase {
  SynthParams params;
  SpineMask mask;
  OracleRecord oracle;
};

/// Evaluates the generating curve directly; never touches the fitted
/// polynomial or the pipeline's breakpoint search.
OracleRecord oracle_cobb(const SynthParams& params, const PipelineConfig& config = {});

/// Rasterizes every row s in [0, L] as the run of columns within
/// half_width of g(s) (plus optional Gaussian centre jitter).
SynthCase generate(const SynthParams& params, std::uint64_t seed = 0, const PipelineConfig& config = {});

/// Amplitudes {10, 20, 30, 45} x periods {400, 572, 800} x half-widths {8, 12, 20}.
std::vector<SynthParams> synth_test_grid();

nlohmann::json to_json(const SynthParams& params);
nlohmann::json to_json(const OracleRecord& oracle, const SynthParams& params);

}  // namespace cobb
