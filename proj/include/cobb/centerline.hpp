#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "cobb/mask_io.hpp"

namespace cobb {

struct CenterPoint {
  double t = 0.0;  // cranio-caudal position (row axis)
  double x = 0.0;  // lateral position (column axis)
};

/// Per-row lateral centers, strictly increasing in t.
struct CenterlinePolyline {
  std::vector<CenterPoint> points;
};

/// Centerline rescaled so that t spans [0, target_length]. The lateral axis
/// uses the same factor about the mean x, so angles are preserved.
/// Original frame: row = t_origin + t / scale_factor, col = x_center + x / scale_factor.
struct NormalizedCenterline {
  CenterlinePolyline line;
  double scale_factor = 1.0;
  double t_origin = 0.0;
  double x_center = 0.0;
};

inline constexpr double kNormalizedLength = 572.0;
inline constexpr int kMaxDegree = 10;
inline constexpr std::size_t kMinCenterlinePoints = 20;

/// Type-erased x = f(t) with its first derivative; what the tilt search and
/// direction estimate operate on.
struct CurveFunction {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double lo = 0.0;
  double hi = 0.0;
};

/// Polynomial x = f(t) on [lo, hi]. Stored in the centered variable
/// u = (t - c) / h with c, h the domain midpoint and half-width; coefficients()
/// converts to the raw-t power basis on request.
class SpineCurve {
 public:
  SpineCurve() = default;

  /// Builds from raw power-basis coefficients c_0..c_d in t.
  static SpineCurve from_coefficients(const std::vector<double>& coefficients, double lo, double hi);

  double value(double t) const;
  double slope(double t) const;
  double operator()(double t) const { return value(t); }

  /// Exact analytic derivative. order must be 1 or 2.
  SpineCurve derivative(int order = 1) const;

  /// Power-basis coefficients in t, c_0 first.
  std::vector<double> coefficients() const;
  const std::vector<double>& scaled_coefficients() const noexcept { return scaled_; }

  int degree() const noexcept { return static_cast<int>(scaled_.size()) - 1; }
  double domain_lo() const noexcept { return lo_; }
  double domain_hi() const noexcept { return hi_; }
  double rms_residual() const noexcept { return rms_residual_; }

  CurveFunction as_function() const;

 private:
  friend SpineCurve fit_curve(const NormalizedCenterline&, int);

  SpineCurve(std::vector<double> scaled, double lo, double hi);
  double center() const noexcept { return 0.5 * (lo_ + hi_); }
  double half_span() const noexcept { return 0.5 * (hi_ - lo_); }

  std::vector<double> scaled_{0.0};
  double lo_ = 0.0;
  double hi_ = 1.0;
  double rms_residual_ = 0.0;
};

/// Midpoint of the longest contiguous foreground run in every row that has
/// foreground (leftmost run on ties). Rows without foreground are skipped.
CenterlinePolyline extract_centerline(const SpineMask& mask);

NormalizedCenterline normalize_centerline(const CenterlinePolyline& line,
                                          double target_length = kNormalizedLength);

/// Least-squares polynomial of degree min(max_degree, n - 1) over the
/// normalized points. Solved by column-pivoted QR in the centered basis.
SpineCurve fit_curve(const NormalizedCenterline& line, int max_degree = kMaxDegree);

SpineCurve curve_derivative(const SpineCurve& curve, int order);

/// Debug dump: t, x_raw, f(t) per centerline point.
void write_centerline_csv(const NormalizedCenterline& line, const SpineCurve& curve,
                          const std::filesystem::path& path);

}  // namespace cobb
