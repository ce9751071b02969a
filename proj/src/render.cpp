#include "cobb/render.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "render";
constexpr double kCenterlineStep = 4.0;  // normalized px between polyline vertices
constexpr double kLabelOffset = 12.0;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

OverlayPoint clamp_to(const OverlayPoint& p, int width, int height) {
  return {std::clamp(p.x, 0.0, static_cast<double>(width - 1)), std::clamp(p.y, 0.0, static_cast<double>(height - 1))};
}

void check_geometry(const CaseResult& result, const GrayImage& base) {
  if (base.width != result.frame.image_width || base.height != result.frame.image_height) {
    throw Error(ErrorCode::GeometryMismatch, kStage,
                "base image is " + std::to_string(base.width) + "x" + std::to_string(base.height) +
                    " but the result was measured on " + std::to_string(result.frame.image_width) + "x" +
                    std::to_string(result.frame.image_height));
  }
}

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kYellow{255, 255, 0};
constexpr Rgb kBlue{0, 0, 255};
constexpr Rgb kRed{255, 0, 0};
constexpr Rgb kGreen{0, 200, 0};

class Canvas {
 public:
  Canvas(const GrayImage& base) : width_(base.width), height_(base.height), rgb_(base.pixels.size() * 3) {
    for (std::size_t i = 0; i < base.pixels.size(); ++i) {
      const auto v = static_cast<std::uint8_t>(base.pixels[i] / 2);
      rgb_[3 * i] = rgb_[3 * i + 1] = rgb_[3 * i + 2] = v;
    }
  }

  void plot(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
    rgb_[i] = c.r;
    rgb_[i + 1] = c.g;
    rgb_[i + 2] = c.b;
  }

  void line(OverlayPoint a, OverlayPoint b, Rgb c, int thickness) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    const int half = thickness / 2;
    for (int s = 0; s <= steps; ++s) {
      const double f = static_cast<double>(s) / steps;
      const int x = static_cast<int>(std::lround(a.x + f * (b.x - a.x)));
      const int y = static_cast<int>(std::lround(a.y + f * (b.y - a.y)));
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) plot(x + dx, y + dy, c);
      }
    }
  }

  // 3x5 bitmap glyphs for digits, '.', '-' and the degree sign.
  void text(OverlayPoint at, const std::string& s, Rgb c, int scale) {
    int glyphs = 0;
    for (unsigned char ch : s) glyphs += (ch & 0xC0) != 0x80;
    int x = std::max(0, std::min(static_cast<int>(std::lround(at.x)), width_ - glyphs * 4 * scale));
    const int y = static_cast<int>(std::lround(at.y)) - 5 * scale;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const unsigned char ch = static_cast<unsigned char>(s[i]);
      const std::uint16_t* glyph = nullptr;
      if (ch >= '0' && ch <= '9') glyph = &kDigits[ch - '0'];
      else if (ch == '.') glyph = &kDot;
      else if (ch == '-') glyph = &kMinus;
      else if (ch == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xB0) {
        glyph = &kDegree;
        ++i;
      }
      if (glyph) {
        for (int gy = 0; gy < 5; ++gy) {
          for (int gx = 0; gx < 3; ++gx) {
            if (!(*glyph >> (14 - (gy * 3 + gx)) & 1)) continue;
            for (int sy = 0; sy < scale; ++sy) {
              for (int sx = 0; sx < scale; ++sx) plot(x + gx * scale + sx, y + gy * scale + sy, c);
            }
          }
        }
      }
      x += 4 * scale;
    }
  }

  std::vector<std::uint8_t> encode() const {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(width_);
    png.height = static_cast<png_uint_32>(height_);
    png.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, rgb_.data(), 0, nullptr)) {
      throw Error(ErrorCode::InvalidArgument, kStage, std::string("PNG encoding failed: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, rgb_.data(), 0, nullptr)) {
      throw Error(ErrorCode::InvalidArgument, kStage, std::string("PNG encoding failed: ") + png.message);
    }
    out.resize(size);
    return out;
  }

 private:
  // Rows top to bottom, 3 bits per row, packed MSB-first into 15 bits.
  static constexpr std::array<std::uint16_t, 10> kDigits{
      0b111'101'101'101'111, 0b010'110'010'010'111, 0b111'001'111'100'111, 0b111'001'111'001'111,
      0b101'101'111'001'001, 0b111'100'111'001'111, 0b111'100'111'101'111, 0b111'001'010'010'010,
      0b111'101'111'101'111, 0b111'101'111'001'111};
  static constexpr std::uint16_t kDot = 0b000'000'000'000'010;
  static constexpr std::uint16_t kMinus = 0b000'000'111'000'000;
  static constexpr std::uint16_t kDegree = 0b010'101'010'000'000;

  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

}  // namespace

OverlaySpec build_overlay(const CaseResult& result) {
  const auto& frame = result.frame;
  OverlaySpec spec;
  spec.width = frame.image_width;
  spec.height = frame.image_height;

  const double lo = result.curve.domain_lo();
  const double hi = result.curve.domain_hi();
  for (double t = lo;; t += kCenterlineStep) {
    const double tt = std::min(t, hi);
    spec.centerline.push_back({frame.col_of(result.curve.value(tt)), frame.row_of(tt)});
    if (tt >= hi) break;
  }

  for (const auto& d : result.tilts) {
    const double t = d.tilt.t_star;
    const OverlayPoint c{frame.col_of(result.curve.value(t)), frame.row_of(t)};
    const double theta = d.direction.theta_deg * std::numbers::pi / 180.0;
    // Axis direction in (column, row): tan(theta) = d col / d row.
    const double dx = 0.5 * kTickLength * std::sin(theta);
    const double dy = 0.5 * kTickLength * std::cos(theta);
    spec.ticks.push_back({c, {c.x - dx, c.y - dy}, {c.x + dx, c.y + dy}});
  }

  for (std::size_t k = 0; k < result.measurements.size(); ++k) {
    const auto& m = result.measurements[k];
    const double t_mid = 0.5 * (m.upper.tilt.t_star + m.lower.tilt.t_star);
    const OverlayPoint mid{frame.col_of(result.curve.value(t_mid)) + kLabelOffset, frame.row_of(t_mid)};
    spec.labels.push_back({clamp_to(mid, spec.width, spec.height), fixed2(m.angle_deg) + "°", m.is_main});
  }
  return spec;
}

std::string render_svg(const CaseResult& result) {
  const OverlaySpec spec = build_overlay(result);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(spec.width) +
         "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  out += "<polyline class=\"centerline\" fill=\"none\" stroke=\"yellow\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < spec.centerline.size(); ++i) {
    if (i) out += ' ';
    out += fixed2(spec.centerline[i].x) + "," + fixed2(spec.centerline[i].y);
  }
  out += "\"/>\n";
  for (const auto& t : spec.ticks) {
    out += "<line class=\"direction\" x1=\"" + fixed2(t.from.x) + "\" y1=\"" + fixed2(t.from.y) + "\" x2=\"" +
           fixed2(t.to.x) + "\" y2=\"" + fixed2(t.to.y) + "\" stroke=\"blue\" stroke-width=\"2\"/>\n";
  }
  for (const auto& l : spec.labels) {
    out += "<text class=\"cobb-angle\" x=\"" + fixed2(l.anchor.x) + "\" y=\"" + fixed2(l.anchor.y) + "\" fill=\"" +
           (l.is_main ? "red" : "green") + "\" font-family=\"sans-serif\" font-size=\"16\">" + l.text + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::uint8_t> render_png(const CaseResult& result, const GrayImage& base) {
  check_geometry(result, base);
  const OverlaySpec spec = build_overlay(result);
  Canvas canvas(base);
  for (std::size_t i = 0; i + 1 < spec.centerline.size(); ++i) canvas.line(spec.centerline[i], spec.centerline[i + 1], kYellow, 1);
  for (const auto& t : spec.ticks) canvas.line(t.from, t.to, kBlue, 3);
  for (const auto& l : spec.labels) canvas.text(l.anchor, l.text, l.is_main ? kRed : kGreen, 2);
  return canvas.encode();
}

std::vector<std::uint8_t> render_overlay(const CaseResult& result, const GrayImage& base, OverlayFormat format) {
  check_geometry(result, base);
  if (format == OverlayFormat::Png) return render_png(result, base);
  const std::string svg = render_svg(result);
  return {svg.begin(), svg.end()};
}

}  // namespace cobb
