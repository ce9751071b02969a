#include <doctest.h>

#include <png.h>

#include <cmath>
#include <numbers>
#include <regex>

#include "cobb/render.hpp"
#include "cobb/synth.hpp"
#include "test_support.hpp"

using namespace cobb;
using cobb::testing::band_mask;
using cobb::testing::code_of;

namespace {

struct SvgLine {
  double x1, y1, x2, y2;
};

struct SvgText {
  std::string fill;
  std::string body;
};

std::vector<SvgLine> svg_lines(const std::string& svg) {
  static const std::regex re(R"re(<line class="direction" x1="([-0-9.]+)" y1="([-0-9.]+)" x2="([-0-9.]+)" y2="([-0-9.]+)")re");
  std::vector<SvgLine> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back({std::stod((*it)[1]), std::stod((*it)[2]), std::stod((*it)[3]), std::stod((*it)[4])});
  }
  return out;
}

std::vector<SvgText> svg_texts(const std::string& svg) {
  static const std::regex re(R"re(<text class="cobb-angle"[^>]* fill="([a-z]+)"[^>]*>([^<]*)</text>)re");
  std::vector<SvgText> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back({(*it)[1], (*it)[2]});
  }
  return out;
}

// Undirected angle between two directions given in degrees.
double axis_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

SynthCase s_curve() {
  SynthParams p;
  p.amplitude = 30;
  p.period = 572;
  return generate(p);
}

}  // namespace

TEST_CASE("straight spine overlay has one red label") {
  const CaseResult r = measure_image(band_mask(100, 300, 0, 299, 40, 60));
  const std::string svg = render_svg(r);
  const auto texts = svg_texts(svg);
  REQUIRE(texts.size() == r.measurements.size());
  int red = 0;
  for (const auto& t : texts) {
    red += t.fill == "red";
    CHECK((t.fill == "red" || t.fill == "green"));
  }
  CHECK(red == 1);
  const auto& main_text = texts[r.main_index];
  CHECK(main_text.fill == "red");
  CHECK(main_text.body.rfind("0.", 0) == 0);
  CHECK(svg_lines(svg).size() == r.tilts.size());
  CHECK(svg.find("<polyline class=\"centerline\"") != std::string::npos);
}

TEST_CASE("labels: one red, the rest green") {
  const SynthCase sc = s_curve();
  const CaseResult r = measure_image(sc.mask);
  const auto texts = svg_texts(render_svg(r));
  REQUIRE(texts.size() == r.tilts.size() - 1);
  for (std::size_t k = 0; k < texts.size(); ++k) {
    CHECK(texts[k].fill == (k == r.main_index ? "red" : "green"));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f\xC2\xB0", r.measurements[k].angle_deg);
    CHECK(texts[k].body == buf);
  }
}

TEST_CASE("SVG output is byte-identical across runs") {
  const SynthCase sc = s_curve();
  CHECK(render_svg(measure_image(sc.mask)) == render_svg(measure_image(sc.mask)));
}

TEST_CASE("direction ticks are parallel to oracle directions") {
  const SynthCase sc = s_curve();
  const CaseResult r = measure_image(sc.mask);
  const auto lines = svg_lines(render_svg(r));
  REQUIRE(lines.size() == sc.oracle.tilt_points.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double drawn = std::atan2(lines[i].x2 - lines[i].x1, lines[i].y2 - lines[i].y1) * 180.0 / std::numbers::pi;
    CHECK(axis_gap(drawn, sc.oracle.tilt_points[i].theta_deg) <= 0.5);
  }
}

TEST_CASE("tick centres map back to tilt positions") {
  const SynthCase sc = s_curve();
  const CaseResult r = measure_image(sc.mask);
  const OverlaySpec spec = build_overlay(r);
  REQUIRE(spec.ticks.size() == r.tilts.size());
  CHECK(spec.width == sc.mask.width());
  CHECK(spec.height == sc.mask.height());
  for (std::size_t i = 0; i < spec.ticks.size(); ++i) {
    const auto& c = spec.ticks[i].center;
    const double t_back = (c.y - r.frame.roi.top - r.frame.t_origin) * r.frame.scale_factor;
    const double x_back = (c.x - r.frame.roi.left - r.frame.x_center) * r.frame.scale_factor;
    const double t = r.tilts[i].tilt.t_star;
    CHECK(std::abs(t_back - t) / r.frame.scale_factor <= 1.0);
    CHECK(std::abs(x_back - r.curve(t)) / r.frame.scale_factor <= 1.0);
    const double len = std::hypot(spec.ticks[i].to.x - spec.ticks[i].from.x, spec.ticks[i].to.y - spec.ticks[i].from.y);
    CHECK(len == doctest::Approx(kTickLength));
  }
}

TEST_CASE("PNG overlay decodes to an RGB image of the mask size") {
  const SynthCase sc = s_curve();
  const CaseResult r = measure_image(sc.mask);
  const auto bytes = render_overlay(r, to_gray(sc.mask), OverlayFormat::Png);

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  REQUIRE(png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()));
  CHECK(static_cast<int>(img.width) == sc.mask.width());
  CHECK(static_cast<int>(img.height) == sc.mask.height());
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(img));
  REQUIRE(png_image_finish_read(&img, nullptr, rgb.data(), 0, nullptr));
  std::size_t red = 0, blue = 0;
  for (std::size_t i = 0; i + 2 < rgb.size(); i += 3) {
    red += rgb[i] > 200 && rgb[i + 1] < 60 && rgb[i + 2] < 60;
    blue += rgb[i] < 60 && rgb[i + 1] < 60 && rgb[i + 2] > 200;
  }
  CHECK(red > 0);
  CHECK(blue > 0);
}

TEST_CASE("overlay rejects a base image of the wrong size") {
  const SynthCase sc = s_curve();
  const CaseResult r = measure_image(sc.mask);
  GrayImage wrong{sc.mask.width() + 1, sc.mask.height(), {}};
  wrong.pixels.assign(static_cast<std::size_t>(wrong.width) * wrong.height, 0);
  CHECK(code_of([&] { render_overlay(r, wrong, OverlayFormat::Png); }) == ErrorCode::GeometryMismatch);
  CHECK(code_of([&] { render_overlay(r, wrong, OverlayFormat::Svg); }) == ErrorCode::GeometryMismatch);
}
