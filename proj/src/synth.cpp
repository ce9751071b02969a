#include "cobb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "synth";
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRootGrid = 10000;
constexpr int kArgmaxGrid = 10000;
constexpr double kOracleTolerance = 1e-9;

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

void check_params(const SynthParams& p) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, kStage, what);
  };
  require(p.spine_length >= 20, "spine_length must be at least 20 rows");
  require(p.half_width >= 0, "half_width must be non-negative");
  require(p.margin >= 0, "margin must be non-negative");
  require(p.noise_px >= 0.0, "noise_px must be non-negative");
  if (p.family == CurveFamily::Sinusoid || p.family == CurveFamily::DoubleSinusoid) {
    require(p.period > 0.0, "period must be positive");
  }
  if (p.family == CurveFamily::DoubleSinusoid) require(p.period2 > 0.0, "period2 must be positive");
  if (p.family == CurveFamily::Arc) {
    require(p.radius > 0.5 * p.spine_length, "arc radius must exceed half the spine length");
  }
}

// sign(g') * g'' changes from + to - at an interior maximum of |g'|.
double refine_tilt(const SynthParams& p, double scale, double a, double b) {
  auto q = [&](double t) {
    const double s = t * scale;
    const double d1 = p.center_slope(s);
    return (d1 >= 0.0 ? 1.0 : -1.0) * p.center_curvature(s);
  };
  double qa = q(a);
  const double qb = q(b);
  if (!(qa >= 0.0 && qb <= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  while (b - a > kOracleTolerance) {
    const double m = 0.5 * (a + b);
    const double qm = q(m);
    if (qm > 0.0) {
      a = m;
      qa = qm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

void bisect_splits(std::vector<OracleBreakpoint>& out, double lo, double hi, double max_len) {
  if (hi - lo <= max_len) return;
  const double mid = 0.5 * (lo + hi);
  bisect_splits(out, lo, mid, max_len);
  out.push_back({mid, "midpoint_split"});
  bisect_splits(out, mid, hi, max_len);
}

}  // namespace

std::string_view to_string(CurveFamily family) {
  switch (family) {
    case CurveFamily::Line: return "line";
    case CurveFamily::Arc: return "arc";
    case CurveFamily::Sinusoid: return "sinusoid";
    case CurveFamily::DoubleSinusoid: return "double_sinusoid";
  }
  return "unknown";
}

CurveFamily parse_curve_family(std::string_view name) {
  if (name == "line") return CurveFamily::Line;
  if (name == "arc") return CurveFamily::Arc;
  if (name == "sinusoid") return CurveFamily::Sinusoid;
  if (name == "double_sinusoid") return CurveFamily::DoubleSinusoid;
  throw Error(ErrorCode::InvalidArgument, kStage, "unknown curve family '" + std::string(name) + "'");
}

double SynthParams::center(double s) const { return 0.5 * (raster_width() - 1) + lateral(s); }

double SynthParams::lateral(double s) const {
  const double L = spine_length;
  switch (family) {
    case CurveFamily::Line:
      return slope * (s - 0.5 * L);
    case CurveFamily::Arc: {
      const double d = s - 0.5 * L;
      const double chord_offset = std::sqrt(radius * radius - 0.25 * L * L);
      return std::sqrt(radius * radius - d * d) - 0.5 * (radius + chord_offset);
    }
    case CurveFamily::Sinusoid:
      return amplitude * std::sin(kTwoPi * s / period + phase);
    case CurveFamily::DoubleSinusoid:
      return amplitude * std::sin(kTwoPi * s / period + phase) +
             amplitude2 * std::sin(kTwoPi * s / period2 + phase2);
  }
  return 0.0;
}

double SynthParams::center_slope(double s) const {
  const double L = spine_length;
  switch (family) {
    case CurveFamily::Line:
      return slope;
    case CurveFamily::Arc: {
      const double d = s - 0.5 * L;
      return -d / std::sqrt(radius * radius - d * d);
    }
    case CurveFamily::Sinusoid:
      return amplitude * kTwoPi / period * std::cos(kTwoPi * s / period + phase);
    case CurveFamily::DoubleSinusoid:
      return amplitude * kTwoPi / period * std::cos(kTwoPi * s / period + phase) +
             amplitude2 * kTwoPi / period2 * std::cos(kTwoPi * s / period2 + phase2);
  }
  return 0.0;
}

double SynthParams::center_curvature(double s) const {
  const double L = spine_length;
  switch (family) {
    case CurveFamily::Line:
      return 0.0;
    case CurveFamily::Arc: {
      const double d = s - 0.5 * L;
      const double r2 = radius * radius - d * d;
      return -radius * radius / (r2 * std::sqrt(r2));
    }
    case CurveFamily::Sinusoid: {
      const double w = kTwoPi / period;
      return -amplitude * w * w * std::sin(w * s + phase);
    }
    case CurveFamily::DoubleSinusoid: {
      const double w1 = kTwoPi / period;
      const double w2 = kTwoPi / period2;
      return -amplitude * w1 * w1 * std::sin(w1 * s + phase) - amplitude2 * w2 * w2 * std::sin(w2 * s + phase2);
    }
  }
  return 0.0;
}

int SynthParams::raster_height() const { return height > 0 ? height : spine_length + 1 + 2 * margin; }

int SynthParams::top_row() const { return (raster_height() - spine_length - 1) / 2; }

int SynthParams::raster_width() const {
  if (width > 0) return width;
  double lo = 0.0;
  double hi = 0.0;
  const int samples = 4 * spine_length;
  for (int i = 0; i <= samples; ++i) {
    const double v = lateral(spine_length * static_cast<double>(i) / samples);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double extent = std::max(hi, -lo) + half_width + 4.0 * noise_px + margin;
  return 2 * static_cast<int>(std::ceil(extent)) + 1;
}

OracleRecord oracle_cobb(const SynthParams& params, const PipelineConfig& config) {
  check_params(params);
  const double n_len = config.normalized_length;
  const double scale = params.spine_length / n_len;  // s per unit t
  auto slope_at = [&](double t) { return params.center_slope(t * scale); };
  auto sign = [&](double v) { return v > config.slope_eps ? 1 : (v < -config.slope_eps ? -1 : 0); };

  std::vector<double> roots;
  double prev_t = 0.0;
  int prev_sign = sign(slope_at(0.0));
  for (int k = 1; k <= kRootGrid; ++k) {
    const double t = n_len * k / kRootGrid;
    const int s = sign(slope_at(t));
    if (s == 0) continue;
    if (prev_sign != 0 && s != prev_sign) {
      double a = prev_t;
      double b = t;
      const double fa_sign = prev_sign;
      while (b - a > kOracleTolerance) {
        const double m = 0.5 * (a + b);
        if ((slope_at(m) > 0.0 ? 1.0 : -1.0) == fa_sign) a = m;
        else b = m;
      }
      const double root = 0.5 * (a + b);
      const bool near_end = root < 1.0 || n_len - root < 1.0;
      const bool near_prev = !roots.empty() && root - roots.back() < 1.0;
      if (!near_end && !near_prev) roots.push_back(root);
    }
    prev_sign = s;
    prev_t = t;
  }

  OracleRecord rec;
  rec.breakpoints.push_back({0.0, "endpoint"});
  double last = 0.0;
  for (double r : roots) {
    bisect_splits(rec.breakpoints, last, r, config.max_interval);
    rec.breakpoints.push_back({r, "apex"});
    last = r;
  }
  bisect_splits(rec.breakpoints, last, n_len, config.max_interval);
  rec.breakpoints.push_back({n_len, "endpoint"});

  for (std::size_t i = 0; i + 1 < rec.breakpoints.size(); ++i) {
    const double lo = rec.breakpoints[i].t;
    const double hi = rec.breakpoints[i + 1].t;
    const double step = (hi - lo) / kArgmaxGrid;
    int best_k = 0;
    double best = std::abs(slope_at(lo));
    for (int k = 1; k <= kArgmaxGrid; ++k) {
      const double v = std::abs(slope_at(lo + step * k));
      if (v > best + 1e-12 * std::max(1.0, best)) {
        best = v;
        best_k = k;
      }
    }
    double t_star = lo + step * best_k;
    if (best_k > 0 && best_k < kArgmaxGrid) {
      const double refined = refine_tilt(params, scale, lo + step * (best_k - 1), lo + step * (best_k + 1));
      if (std::isfinite(refined) && std::abs(slope_at(refined)) >= best) t_star = refined;
    }

    OracleTilt tilt;
    tilt.t = t_star;
    tilt.slope = slope_at(t_star);
    tilt.pointwise_theta_deg = degrees(std::atan(tilt.slope));
    tilt.interval_lo = lo;
    tilt.interval_hi = hi;
    const double lt = config.tolerance_fraction * (hi - lo);
    const double w_lo = std::max(lo, t_star - 0.5 * lt);
    const double w_hi = std::min(hi, t_star + 0.5 * lt);
    if (w_hi > w_lo) {
      const double s_lo = w_lo * scale;
      const double s_hi = w_hi * scale;
      tilt.theta_deg = degrees(std::atan((params.lateral(s_hi) - params.lateral(s_lo)) / (s_hi - s_lo)));
    } else {
      tilt.theta_deg = tilt.pointwise_theta_deg;
    }
    rec.tilt_points.push_back(tilt);
  }

  for (std::size_t k = 0; k + 1 < rec.tilt_points.size(); ++k) {
    rec.cobb_angles_deg.push_back(std::abs(rec.tilt_points[k].theta_deg - rec.tilt_points[k + 1].theta_deg));
  }
  for (std::size_t k = 0; k < rec.cobb_angles_deg.size(); ++k) {
    if (rec.cobb_angles_deg[k] > rec.cobb_angles_deg[rec.main_index]) rec.main_index = k;
  }
  if (!rec.cobb_angles_deg.empty()) rec.main_angle_deg = rec.cobb_angles_deg[rec.main_index];
  return rec;
}

SynthCase generate(const SynthParams& params, std::uint64_t seed, const PipelineConfig& config) {
  check_params(params);
  const int w = params.raster_width();
  const int h = params.raster_height();
  const int top = params.top_row();
  if (top < 0 || top + params.spine_length >= h) {
    throw Error(ErrorCode::OutOfFrame, kStage, "spine does not fit vertically in the raster");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, params.noise_px > 0.0 ? params.noise_px : 1.0);

  const double cx = 0.5 * (w - 1);
  SynthCase out{params, SpineMask(w, h, params.name), {}};
  for (int s = 0; s <= params.spine_length; ++s) {
    double c = cx + params.lateral(s);
    if (params.noise_px > 0.0) c += jitter(rng);
    const int first = static_cast<int>(std::ceil(c - params.half_width));
    const int last = static_cast<int>(std::floor(c + params.half_width));
    if (first < 0 || last > w - 1) {
      throw Error(ErrorCode::OutOfFrame, kStage,
                  "band leaves the raster at row " + std::to_string(top + s) + " (columns " + std::to_string(first) +
                      ".." + std::to_string(last) + ", width " + std::to_string(w) + ")");
    }
    for (int col = first; col <= last; ++col) out.mask.set(top + s, col);
  }
  out.oracle = oracle_cobb(params, config);
  return out;
}

std::vector<SynthParams> synth_test_grid() {
  std::vector<SynthParams> grid;
  for (double amplitude : {10.0, 20.0, 30.0, 45.0}) {
    for (double period : {400.0, 572.0, 800.0}) {
      for (int half_width : {8, 12, 20}) {
        SynthParams p;
        p.family = CurveFamily::Sinusoid;
        p.amplitude = amplitude;
        p.period = period;
        p.half_width = half_width;
        p.name = "sin_a" + std::to_string(static_cast<int>(amplitude)) + "_p" + std::to_string(static_cast<int>(period)) +
                 "_w" + std::to_string(half_width);
        grid.push_back(p);
      }
    }
  }
  return grid;
}

nlohmann::json to_json(const SynthParams& p) {
  return {{"name", p.name},
          {"family", std::string(to_string(p.family))},
          {"amplitude", p.amplitude},
          {"period", p.period},
          {"phase", p.phase},
          {"slope", p.slope},
          {"radius", p.radius},
          {"amplitude2", p.amplitude2},
          {"period2", p.period2},
          {"phase2", p.phase2},
          {"half_width", p.half_width},
          {"spine_length", p.spine_length},
          {"margin", p.margin},
          {"width", p.raster_width()},
          {"height", p.raster_height()},
          {"noise_px", p.noise_px}};
}

nlohmann::json to_json(const OracleRecord& oracle, const SynthParams& params) {
  using nlohmann::json;
  json bps = json::array();
  for (const auto& b : oracle.breakpoints) bps.push_back({{"t", b.t}, {"kind", b.kind}});
  json tilts = json::array();
  for (const auto& t : oracle.tilt_points) {
    tilts.push_back({{"t", t.t}, {"theta_deg", t.theta_deg}, {"slope", t.slope}, {"pointwise_theta_deg", t.pointwise_theta_deg}});
  }
  return json{{"params", to_json(params)},
              {"breakpoints", bps},
              {"tilt_points", tilts},
              {"cobb_angles_deg", oracle.cobb_angles_deg},
              {"main_angle_deg", oracle.main_angle_deg}};
}

}  // namespace cobb
