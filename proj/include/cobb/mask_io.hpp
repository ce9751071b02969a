#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cobb {

/// 8-bit single-channel raster, row-major, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Binary spine foreground. Row 0 is the cranial end.
class SpineMask {
 public:
  SpineMask() = default;
  SpineMask(int width, int height, std::string source_id = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::string& source_id() const noexcept { return source_id_; }
  void set_source_id(std::string id) { source_id_ = std::move(id); }

  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool on = true) { bits_[index(row, col)] = on ? 1 : 0; }
  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::size_t foreground_count() const noexcept;
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// Compares geometry and foreground; source_id is a label and is ignored.
  friend bool operator==(const SpineMask& a, const SpineMask& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width_ + col; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  std::string source_id_;
};

/// Inclusive pixel bounds of the foreground.
struct RoiBox {
  int top = 0;
  int left = 0;
  int bottom = 0;
  int right = 0;

  int height() const noexcept { return bottom - top + 1; }
  int width() const noexcept { return right - left + 1; }
  friend bool operator==(const RoiBox&, const RoiBox&) = default;
};

struct ValidatedMask {
  SpineMask mask;
  std::size_t discarded_components = 0;
};

struct CroppedMask {
  SpineMask mask;
  RoiBox box;
};

inline constexpr std::size_t kDefaultMinArea = 100;

/// Reads an 8-bit grayscale PNG or binary PGM (P5).
GrayImage load_gray_image(const std::filesystem::path& path);

/// Loads a mask; any pixel value > 0 is foreground. Throws EmptyMask when
/// nothing is set. source_id defaults to the file stem.
SpineMask load_mask(const std::filesystem::path& path);

void save_gray_png(const GrayImage& image, const std::filesystem::path& path);
void save_mask_png(const SpineMask& mask, const std::filesystem::path& path);
void save_mask_pgm(const SpineMask& mask, const std::filesystem::path& path);

/// 8-bit RGB PNG writer used by the overlay renderer.
void save_rgb_png(int width, int height, const std::vector<std::uint8_t>& rgb,
                  const std::filesystem::path& path);

/// Keeps the largest 8-connected component. Equal-area components are
/// resolved in favour of the one whose first pixel in row-major order
/// comes first.
ValidatedMask validate_mask(const SpineMask& mask, std::size_t min_area = kDefaultMinArea);

CroppedMask crop_to_roi(const SpineMask& mask);

GrayImage to_gray(const SpineMask& mask);

/// Left-right reflection: column c maps to width - 1 - c.
SpineMask mirror_horizontal(const SpineMask& mask);

/// Nearest-neighbour upscaling by an integer factor on both axes.
SpineMask upscale_nearest(const SpineMask& mask, int factor);

/// Shifts the foreground by (d_row, d_col) inside a canvas of the given size.
/// Throws OutOfFrame if any foreground pixel would leave the canvas.
SpineMask translate(const SpineMask& mask, int d_row, int d_col, int width, int height);

}  // namespace cobb
