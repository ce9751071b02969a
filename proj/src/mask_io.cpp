#include "cobb/mask_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "mask_io";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kStage, message);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Unreadable, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorCode::Unreadable, name + ": " + image.message);
  }
  if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
    png_image_free(&image);
    fail(ErrorCode::MultiChannel, name + ": expected a single-channel image");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    fail(ErrorCode::Unreadable, name + ": 16-bit samples are not supported");
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::Unreadable, name + ": " + msg);
  }
  return out;
}

// Netpbm header token, skipping whitespace and '#' comments.
bool next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos, std::string& token) {
  token.clear();
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  return !token.empty();
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 2;
  std::string tok;
  std::array<long, 3> fields{};
  for (auto& f : fields) {
    if (!next_token(bytes, pos, tok)) fail(ErrorCode::Unreadable, name + ": truncated PGM header");
    try {
      f = std::stol(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::Unreadable, name + ": bad PGM header field '" + tok + "'");
    }
  }
  const auto [w, h, maxval] = fields;
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) fail(ErrorCode::Unreadable, name + ": bad PGM dimensions");
  if (maxval <= 0 || maxval > 255) fail(ErrorCode::Unreadable, name + ": only 8-bit PGM is supported");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + n) fail(ErrorCode::Unreadable, name + ": truncated PGM raster");
  GrayImage out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return out;
}

}  // namespace

SpineMask::SpineMask(int width, int height, std::string source_id)
    : width_(width), height_(height), source_id_(std::move(source_id)) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t SpineMask::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

GrayImage load_gray_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const std::string name = path.string();
  static constexpr std::array<std::uint8_t, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPngMagic.size() && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
    return decode_png(bytes, name);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5') return decode_pgm(bytes, name);
    if (bytes[1] == '6') fail(ErrorCode::MultiChannel, name + ": PPM is multi-channel");
  }
  fail(ErrorCode::Unreadable, name + ": not a PNG or binary PGM file");
}

SpineMask load_mask(const std::filesystem::path& path) {
  const GrayImage img = load_gray_image(path);
  SpineMask mask(img.width, img.height, path.stem().string());
  bool any = false;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (img.at(r, c) > 0) {
        mask.set(r, c);
        any = true;
      }
    }
  }
  if (!any) fail(ErrorCode::EmptyMask, path.string() + ": no foreground pixels");
  return mask;
}

void save_gray_png(const GrayImage& image, const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.pixels.data(), 0, nullptr)) {
    fail(ErrorCode::Unreadable, "cannot write " + path.string() + ": " + png.message);
  }
}

void save_rgb_png(int width, int height, const std::vector<std::uint8_t>& rgb,
                  const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(width);
  png.height = static_cast<png_uint_32>(height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, rgb.data(), 0, nullptr)) {
    fail(ErrorCode::Unreadable, "cannot write " + path.string() + ": " + png.message);
  }
}

GrayImage to_gray(const SpineMask& mask) {
  GrayImage img;
  img.width = mask.width();
  img.height = mask.height();
  img.pixels.resize(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), img.pixels.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
  return img;
}

void save_mask_png(const SpineMask& mask, const std::filesystem::path& path) {
  save_gray_png(to_gray(mask), path);
}

void save_mask_pgm(const SpineMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Unreadable, "cannot write " + path.string());
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  const GrayImage img = to_gray(mask);
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

ValidatedMask validate_mask(const SpineMask& mask, std::size_t min_area) {
  const int w = mask.width();
  const int h = mask.height();
  const auto& bits = mask.bits();
  std::vector<std::int32_t> label(bits.size(), -1);
  std::vector<std::size_t> stack;
  std::int32_t components = 0;
  std::int32_t best = -1;
  std::size_t best_area = 0;

  for (std::size_t seed = 0; seed < bits.size(); ++seed) {
    if (!bits[seed] || label[seed] >= 0) continue;
    const std::int32_t id = components++;
    std::size_t area = 0;
    label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++area;
      const int r = static_cast<int>(p / static_cast<std::size_t>(w));
      const int c = static_cast<int>(p % static_cast<std::size_t>(w));
      for (int dr = -1; dr <= 1; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -1; dc <= 1; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w) continue;
          const std::size_t q = static_cast<std::size_t>(rr) * w + cc;
          if (bits[q] && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
    // Seeds are visited in row-major order, so strict '>' keeps the
    // lexicographically first component on ties.
    if (area > best_area) {
      best_area = area;
      best = id;
    }
  }

  if (components == 0) fail(ErrorCode::EmptyMask, "mask '" + mask.source_id() + "' has no foreground");
  if (best_area < min_area) {
    fail(ErrorCode::TooSmall, "largest component has " + std::to_string(best_area) + " px, minimum is " +
                                  std::to_string(min_area));
  }

  ValidatedMask out{SpineMask(w, h, mask.source_id()), static_cast<std::size_t>(components - 1)};
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == best) out.mask.set(static_cast<int>(i / w), static_cast<int>(i % w));
  }
  return out;
}

CroppedMask crop_to_roi(const SpineMask& mask) {
  RoiBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      box.top = std::min(box.top, r);
      box.bottom = std::max(box.bottom, r);
      box.left = std::min(box.left, c);
      box.right = std::max(box.right, c);
    }
  }
  if (box.bottom < 0) fail(ErrorCode::EmptyMask, "mask '" + mask.source_id() + "' has no foreground");
  CroppedMask out{SpineMask(box.width(), box.height(), mask.source_id()), box};
  for (int r = box.top; r <= box.bottom; ++r) {
    for (int c = box.left; c <= box.right; ++c) {
      if (mask.at(r, c)) out.mask.set(r - box.top, c - box.left);
    }
  }
  return out;
}

SpineMask mirror_horizontal(const SpineMask& mask) {
  SpineMask out(mask.width(), mask.height(), mask.source_id());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.at(r, c)) out.set(r, mask.width() - 1 - c);
    }
  }
  return out;
}

SpineMask upscale_nearest(const SpineMask& mask, int factor) {
  if (factor < 1) fail(ErrorCode::InvalidArgument, "upscale factor must be at least 1");
  SpineMask out(mask.width() * factor, mask.height() * factor, mask.source_id());
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (mask.at(r / factor, c / factor)) out.set(r, c);
    }
  }
  return out;
}

SpineMask translate(const SpineMask& mask, int d_row, int d_col, int width, int height) {
  SpineMask out(width, height, mask.source_id());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      if (!out.contains(r + d_row, c + d_col)) fail(ErrorCode::OutOfFrame, "translated foreground leaves the canvas");
      out.set(r + d_row, c + d_col);
    }
  }
  return out;
}

}  // namespace cobb
