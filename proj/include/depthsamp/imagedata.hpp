#pragma once

// Core rasters shared by every module, plus Netpbm / CSV file I/O.
//
// Pixel coordinates are (x, y) = (column, row) with the origin at the center
// of the top-left pixel, so continuous locations live in [0, W-1] x [0, H-1].
// All rasters are row-major.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace depthsamp {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Lab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PixelIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

// Ordered list of continuous sampling locations.
using SampleSet = std::vector<Point2>;

class RgbImage {
 public:
  // Throws ParameterError unless width, height >= 1.
  RgbImage(int width, int height, Rgb fill = {});
  // data holds width*height packed r,g,b triples.
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  Rgb at(int x, int y) const {
    const std::size_t i = 3 * index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = 3 * index(x, y);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }
  std::span<const std::uint8_t> bytes() const { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

class LabImage {
 public:
  LabImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  const Lab& at(int x, int y) const { return pixels_[index(x, y)]; }
  Lab& at(int x, int y) { return pixels_[index(x, y)]; }
  const Lab& operator[](std::size_t i) const { return pixels_[i]; }
  Lab& operator[](std::size_t i) { return pixels_[i]; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<Lab> pixels_;
};

// Depth in millimeters with a validity flag per pixel. Invalid pixels always
// store depth 0.
class DepthMap {
 public:
  // All pixels start invalid.
  DepthMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return depth_.size(); }

  double depth(int x, int y) const { return depth_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  double depth(std::size_t i) const { return depth_[i]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }

  // Marks the pixel valid. Throws ParameterError on negative or non-finite
  // depth.
  void set(int x, int y, double depth_mm) { set(index(x, y), depth_mm); }
  void set(std::size_t i, double depth_mm);
  void invalidate(int x, int y) { invalidate(index(x, y)); }
  void invalidate(std::size_t i) {
    depth_[i] = 0.0;
    valid_[i] = 0;
  }

  std::size_t valid_count() const;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<double> depth_;
  std::vector<std::uint8_t> valid_;
};

// Binary sampling plan. count() always equals the number of set bits.
class SamplingMask {
 public:
  SamplingMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t count() const { return count_; }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(int x, int y) { set(index(x, y)); }
  void set(std::size_t i);
  void reset(std::size_t i);

  // Set pixels in scan order.
  std::vector<PixelIndex> pixels() const;

  friend bool operator==(const SamplingMask&, const SamplingMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

// Rounds a continuous coordinate to the nearest pixel index; exact halves go
// to the smaller index.
inline int round_half_down(double v) {
  return static_cast<int>(std::ceil(v - 0.5));
}

// Mask pixels as continuous locations, scan order.
SampleSet mask_to_locations(const SamplingMask& mask);

// --- Netpbm / CSV I/O -------------------------------------------------------

// Binary P6, maxval 255.
RgbImage load_ppm(const std::filesystem::path& path);
void save_ppm(const RgbImage& img, const std::filesystem::path& path);

// Binary P5, maxval 65535, big-endian samples. Sample 0 means "no
// measurement".
DepthMap load_pgm16(const std::filesystem::path& path);
// Depth is rounded to the nearest millimeter and clamped to [0, 65535].
void save_pgm16(const DepthMap& depth, const std::filesystem::path& path);

// Binary P5, maxval 255; 255 marks a sampled pixel. Loading accepts any
// non-zero value as sampled.
SamplingMask load_mask(const std::filesystem::path& path);
void save_mask(const SamplingMask& mask, const std::filesystem::path& path);

// 16-bit P5 label dump (debugging aid for segmentations).
void save_labels16(std::span<const int> labels, int width, int height,
                   const std::filesystem::path& path);

// CSV with header "x,y" and six decimal places per coordinate.
void save_samples(const SampleSet& samples, const std::filesystem::path& path);
SampleSet load_samples(const std::filesystem::path& path);

// In-memory parsers used by the loaders above.
RgbImage parse_ppm(std::span<const std::uint8_t> bytes);
DepthMap parse_pgm16(std::span<const std::uint8_t> bytes);
SamplingMask parse_mask(std::span<const std::uint8_t> bytes);

// --- Color ------------------------------------------------------------------

// sRGB (D65) -> CIE XYZ -> CIELAB for a single pixel.
Lab srgb_to_lab(Rgb c);
LabImage rgb_to_lab(const RgbImage& img);

}  // namespace depthsamp
