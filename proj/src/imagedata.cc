#include "depthsamp/imagedata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "depthsamp/errors.hpp"

namespace depthsamp {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ParameterError("raster dimensions must be positive, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& header,
                std::span<const std::uint8_t> payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

// Netpbm header: magic, then width, height, maxval separated by whitespace
// with '#' comments running to end of line; exactly one whitespace byte
// precedes the raster.
PnmHeader parse_header(std::span<const std::uint8_t> bytes,
                       const char* magic) {
  if (bytes.size() < 2) throw TruncationError("missing Netpbm magic", bytes.size());
  if (bytes[0] != magic[0] || bytes[1] != magic[1]) {
    throw FormatError(std::string("expected magic ") + magic, 0);
  }
  std::size_t pos = 2;
  auto read_int = [&](const char* field) {
    bool saw_space = false;
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        saw_space = true;
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size()) {
      throw TruncationError(std::string("header ends before ") + field, pos);
    }
    if (!saw_space) {
      throw FormatError(std::string("missing whitespace before ") + field, pos);
    }
    if (bytes[pos] < '0' || bytes[pos] > '9') {
      throw FormatError(std::string("expected digit in ") + field, pos);
    }
    long long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (1 << 30)) {
        throw FormatError(std::string(field) + " out of range", pos);
      }
      ++pos;
    }
    return static_cast<int>(value);
  };
  PnmHeader h;
  h.width = read_int("width");
  h.height = read_int("height");
  const std::size_t maxval_pos = pos;
  h.maxval = read_int("maxval");
  if (h.width < 1 || h.height < 1) {
    throw FormatError("zero image dimension", maxval_pos);
  }
  if (pos >= bytes.size()) throw TruncationError("header ends after maxval", pos);
  if (!is_space(bytes[pos])) {
    throw FormatError("expected single whitespace after maxval", pos);
  }
  h.payload_offset = pos + 1;
  return h;
}

void check_payload(const PnmHeader& h, std::span<const std::uint8_t> bytes,
                   std::size_t bytes_per_pixel) {
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height *
                           bytes_per_pixel;
  if (bytes.size() < h.payload_offset + need) {
    throw TruncationError("payload truncated: expected " +
                              std::to_string(need) + " bytes",
                          bytes.size());
  }
}

std::string pnm_header(const char* magic, int width, int height, int maxval) {
  return std::string(magic) + "\n" + std::to_string(width) + " " +
         std::to_string(height) + "\n" + std::to_string(maxval) + "\n";
}

}  // namespace

// --- rasters ---------------------------------------------------------------

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.resize(3 * size());
  for (std::size_t i = 0; i < size(); ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != 3 * size()) {
    throw ParameterError("RGB buffer length " + std::to_string(data_.size()) +
                         " does not match 3*width*height");
  }
}

LabImage::LabImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.resize(static_cast<std::size_t>(width) * height);
}

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  depth_.assign(static_cast<std::size_t>(width) * height, 0.0);
  valid_.assign(depth_.size(), 0);
}

void DepthMap::set(std::size_t i, double depth_mm) {
  if (!std::isfinite(depth_mm) || depth_mm < 0.0) {
    throw ParameterError("depth must be finite and non-negative");
  }
  depth_[i] = depth_mm;
  valid_[i] = 1;
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1));
}

SamplingMask::SamplingMask(int width, int height)
    : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

void SamplingMask::set(std::size_t i) {
  if (!bits_[i]) {
    bits_[i] = 1;
    ++count_;
  }
}

void SamplingMask::reset(std::size_t i) {
  if (bits_[i]) {
    bits_[i] = 0;
    --count_;
  }
}

std::vector<PixelIndex> SamplingMask::pixels() const {
  std::vector<PixelIndex> out;
  out.reserve(count_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (test(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

SampleSet mask_to_locations(const SamplingMask& mask) {
  SampleSet out;
  for (const PixelIndex& p : mask.pixels()) {
    out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  }
  return out;
}

// --- parsers ---------------------------------------------------------------

RgbImage parse_ppm(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes, "P6");
  if (h.maxval != 255) {
    throw FormatError("PPM maxval must be 255, got " + std::to_string(h.maxval),
                      h.payload_offset - 1);
  }
  check_payload(h, bytes, 3);
  const auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset);
  std::vector<std::uint8_t> data(
      begin, begin + static_cast<std::ptrdiff_t>(3 * static_cast<std::size_t>(h.width) * h.height));
  return RgbImage(h.width, h.height, std::move(data));
}

DepthMap parse_pgm16(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes, "P5");
  if (h.maxval != 65535) {
    throw FormatError("depth PGM maxval must be 65535, got " +
                          std::to_string(h.maxval),
                      h.payload_offset - 1);
  }
  check_payload(h, bytes, 2);
  DepthMap d(h.width, h.height);
  const std::uint8_t* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const unsigned v = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    if (v != 0) d.set(i, static_cast<double>(v));
  }
  return d;
}

SamplingMask parse_mask(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes, "P5");
  if (h.maxval != 255) {
    throw FormatError("mask PGM maxval must be 255, got " +
                          std::to_string(h.maxval),
                      h.payload_offset - 1);
  }
  check_payload(h, bytes, 1);
  SamplingMask m(h.width, h.height);
  const std::uint8_t* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (p[i] != 0) m.set(i);
  }
  return m;
}

// --- file I/O --------------------------------------------------------------

RgbImage load_ppm(const std::filesystem::path& path) {
  return parse_ppm(read_file(path));
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  write_file(path, pnm_header("P6", img.width(), img.height(), 255), img.bytes());
}

DepthMap load_pgm16(const std::filesystem::path& path) {
  return parse_pgm16(read_file(path));
}

void save_pgm16(const DepthMap& depth, const std::filesystem::path& path) {
  std::vector<std::uint8_t> payload(2 * depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    unsigned v = 0;
    if (depth.valid(i)) {
      v = static_cast<unsigned>(std::clamp(std::round(depth.depth(i)), 0.0, 65535.0));
    }
    payload[2 * i] = static_cast<std::uint8_t>(v >> 8);
    payload[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
  }
  write_file(path, pnm_header("P5", depth.width(), depth.height(), 65535), payload);
}

SamplingMask load_mask(const std::filesystem::path& path) {
  return parse_mask(read_file(path));
}

void save_mask(const SamplingMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> payload(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) payload[i] = mask.test(i) ? 255 : 0;
  write_file(path, pnm_header("P5", mask.width(), mask.height(), 255), payload);
}

void save_labels16(std::span<const int> labels, int width, int height,
                   const std::filesystem::path& path) {
  if (labels.size() != static_cast<std::size_t>(width) * height) {
    throw ParameterError("label buffer does not match dimensions");
  }
  std::vector<std::uint8_t> payload(2 * labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = static_cast<unsigned>(std::clamp(labels[i], 0, 65535));
    payload[2 * i] = static_cast<std::uint8_t>(v >> 8);
    payload[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
  }
  write_file(path, pnm_header("P5", width, height, 65535), payload);
}

void save_samples(const SampleSet& samples, const std::filesystem::path& path) {
  std::string text = "x,y\n";
  char line[96];
  for (const Point2& p : samples) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f\n", p.x, p.y);
    text += line;
  }
  write_file(path, text, {});
}

SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  SampleSet out;
  std::string line;
  std::size_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line == "x,y") {
      first = false;
      continue;
    }
    first = false;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("sample line without comma", line_offset);
    }
    try {
      std::size_t used_x = 0;
      std::size_t used_y = 0;
      const std::string xs = line.substr(0, comma);
      const std::string ys = line.substr(comma + 1);
      const double x = std::stod(xs, &used_x);
      const double y = std::stod(ys, &used_y);
      if (used_x != xs.size() || used_y != ys.size()) {
        throw FormatError("trailing characters in sample line", line_offset);
      }
      out.push_back({x, y});
    } catch (const std::logic_error&) {
      throw FormatError("unparseable sample coordinate", line_offset);
    }
  }
  return out;
}

}  // namespace depthsamp
