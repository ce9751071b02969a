#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cobb/cobb.hpp"
#include "cobb/mask_io.hpp"

namespace cobb {

enum class OverlayFormat { Svg, Png };

struct OverlayPoint {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

struct OverlayTick {
  OverlayPoint center;
  OverlayPoint from;
  OverlayPoint to;
};

struct OverlayLabel {
  OverlayPoint anchor;
  std::string text;  // "<angle>°", two decimals
  bool is_main = false;
};

/// Overlay geometry in the original image frame. Both output formats are
/// drawn from this.
struct OverlaySpec {
  int width = 0;
  int height = 0;
  std::vector<OverlayPoint> centerline;
  std::vector<OverlayTick> ticks;  // one per tilt point
  std::vector<OverlayLabel> labels;  // one per measurement
};

inline constexpr double kTickLength = 30.0;

OverlaySpec build_overlay(const CaseResult& result);

/// SVG 1.1 using only polyline, line and text elements. Coordinates are
/// printed with two decimals, so equal inputs give identical bytes.
std::string render_svg(const CaseResult& result);

/// 8-bit RGB PNG of the overlay drawn on top of `base`.
std::vector<std::uint8_t> render_png(const CaseResult& result, const GrayImage& base);

/// Throws GeometryMismatch if base does not have the dimensions the result
/// was measured on.
std::vector<std::uint8_t> render_overlay(const CaseResult& result, const GrayImage& base, OverlayFormat format);

}  // namespace cobb
