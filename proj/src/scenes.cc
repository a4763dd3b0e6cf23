#include "depthsamp/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "depthsamp/errors.hpp"
#include "depthsamp/random.hpp"

namespace depthsamp {

namespace {

constexpr double kMinDepth = 500.0;
constexpr double kMaxDepth = 20000.0;

double lab_distance(Rgb p, Rgb q) {
  const Lab a = srgb_to_lab(p);
  const Lab b = srgb_to_lab(q);
  return std::sqrt((a.L - b.L) * (a.L - b.L) + (a.a - b.a) * (a.a - b.a) +
                   (a.b - b.b) * (a.b - b.b));
}

Rgb random_color(Rng& rng) {
  return {static_cast<std::uint8_t>(uniform_index(rng, 256)),
          static_cast<std::uint8_t>(uniform_index(rng, 256)),
          static_cast<std::uint8_t>(uniform_index(rng, 256))};
}

// Colors at least `min_lab` apart where possible.
std::vector<Rgb> distinct_colors(Rng& rng, std::size_t n, double min_lab) {
  std::vector<Rgb> out;
  while (out.size() < n) {
    Rgb best{};
    double best_gap = -1.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const Rgb c = random_color(rng);
      double gap = 1e9;
      for (const Rgb& o : out) gap = std::min(gap, lab_distance(c, o));
      if (gap > best_gap) {
        best_gap = gap;
        best = c;
      }
      if (gap >= min_lab) break;
    }
    out.push_back(best);
  }
  return out;
}

// Integer depths in [500, 20000] at least `min_gap` mm apart where possible.
std::vector<double> distinct_depths(Rng& rng, std::size_t n, double min_gap) {
  std::vector<double> out;
  while (out.size() < n) {
    double d = 0.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      d = std::round(uniform(rng, kMinDepth, kMaxDepth));
      bool ok = true;
      for (double o : out) ok = ok && std::abs(o - d) >= min_gap;
      if (ok) break;
    }
    out.push_back(d);
  }
  return out;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

// A scene defined on a canvas of canvas_width x height pixels; frames are
// windows into it.
class SceneModel {
 public:
  SceneModel(SceneKind kind, int height, int width, int canvas_width, std::uint64_t seed)
      : kind_(kind), height_(height), width_(width) {
    Rng rng(seed);
    switch (kind) {
      case SceneKind::kPiecewiseConstant: {
        const int regions = 3 + static_cast<int>(uniform_index(rng, 6));
        const auto sites = static_cast<std::size_t>(
            std::ceil(regions * static_cast<double>(canvas_width) / width));
        for (std::size_t i = 0; i < sites; ++i) {
          sites_.push_back({uniform(rng, 0.0, canvas_width - 1.0),
                            uniform(rng, 0.0, height - 1.0)});
        }
        colors_ = distinct_colors(rng, sites, 40.0);
        depths_ = distinct_depths(rng, sites, 300.0);
        break;
      }
      case SceneKind::kPlanarRamp: {
        // Gradients chosen so the plane stays inside [500, 20000] mm.
        const double span_x = std::max(canvas_width - 1, 1);
        const double span_y = std::max(height - 1, 1);
        const double total = uniform(rng, 2000.0, 15000.0);
        const double share = uniform01(rng);
        const double gx = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * share * total / span_x;
        const double gy = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * (1.0 - share) * total / span_y;
        const double low = std::min(0.0, gx * span_x) + std::min(0.0, gy * span_y);
        const double high = std::max(0.0, gx * span_x) + std::max(0.0, gy * span_y);
        const double offset = uniform(rng, kMinDepth - low, kMaxDepth - high);
        ramp_ = {offset, gx, gy};
        colors_ = distinct_colors(rng, 2, 30.0);
        break;
      }
      case SceneKind::kStepEdge: {
        const double angle = uniform(rng, 0.0, std::numbers::pi);
        normal_ = {std::cos(angle), std::sin(angle)};
        const Point2 through{uniform(rng, 0.25, 0.75) * (width - 1),
                             uniform(rng, 0.25, 0.75) * (height - 1)};
        offset_ = normal_.x * through.x + normal_.y * through.y;
        colors_ = distinct_colors(rng, 2, 40.0);
        depths_ = distinct_depths(rng, 2, 2000.0);
        break;
      }
      case SceneKind::kTextured: {
        base_depth_ = uniform(rng, 3000.0, 12000.0);
        amplitude_ = uniform(rng, 500.0, 2500.0);
        wavelength_x_ = uniform(rng, 0.5, 1.5) * width;
        wavelength_y_ = uniform(rng, 0.5, 1.5) * height;
        phase_ = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        colors_ = distinct_colors(rng, 4, 25.0);
        texture_seed_ = rng();
        break;
      }
    }
  }

  Rgb color(int x, int y) const {
    switch (kind_) {
      case SceneKind::kPiecewiseConstant:
        return colors_[region(x, y)];
      case SceneKind::kPlanarRamp: {
        const double t = static_cast<double>(y) / std::max(height_ - 1, 1);
        const Rgb a = colors_[0];
        const Rgb b = colors_[1];
        return {to_byte(a.r + t * (b.r - a.r)), to_byte(a.g + t * (b.g - a.g)),
                to_byte(a.b + t * (b.b - a.b))};
      }
      case SceneKind::kStepEdge:
        return colors_[side(x, y)];
      case SceneKind::kTextured: {
        // 2x2-pixel cells of a random four-color palette.
        const std::uint64_t cell = derive_seed(
            texture_seed_, {static_cast<std::uint64_t>(x / 2), static_cast<std::uint64_t>(y / 2)});
        return colors_[cell % colors_.size()];
      }
    }
    return {};
  }

  double depth(int x, int y) const {
    switch (kind_) {
      case SceneKind::kPiecewiseConstant:
        return depths_[region(x, y)];
      case SceneKind::kPlanarRamp:
        return ramp_[0] + ramp_[1] * x + ramp_[2] * y;
      case SceneKind::kStepEdge:
        return depths_[side(x, y)];
      case SceneKind::kTextured:
        return base_depth_ + amplitude_ * std::sin(2.0 * std::numbers::pi * x / wavelength_x_ + phase_) *
                                 std::cos(2.0 * std::numbers::pi * y / wavelength_y_);
    }
    return 0.0;
  }

  SyntheticScene render(int x_offset) const {
    SyntheticScene s;
    s.kind = kind_;
    s.rgb = RgbImage(width_, height_);
    s.depth = DepthMap(width_, height_);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        s.rgb.set(x, y, color(x + x_offset, y));
        s.depth.set(x, y, depth(x + x_offset, y));
      }
    }
    if (kind_ == SceneKind::kPlanarRamp) {
      s.ramp = {ramp_[0] + ramp_[1] * x_offset, ramp_[1], ramp_[2]};
    }
    return s;
  }

 private:
  std::size_t region(int x, int y) const {
    std::size_t best_i = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const double d = (sites_[i].x - x) * (sites_[i].x - x) + (sites_[i].y - y) * (sites_[i].y - y);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    return best_i;
  }

  std::size_t side(int x, int y) const {
    return normal_.x * x + normal_.y * y < offset_ ? 0 : 1;
  }

  SceneKind kind_;
  int height_;
  int width_;
  std::vector<Point2> sites_;
  std::vector<Rgb> colors_;
  std::vector<double> depths_;
  std::array<double, 3> ramp_{};
  Point2 normal_;
  double offset_ = 0.0;
  double base_depth_ = 0.0;
  double amplitude_ = 0.0;
  double wavelength_x_ = 1.0;
  double wavelength_y_ = 1.0;
  double phase_ = 0.0;
  std::uint64_t texture_seed_ = 0;
};

void check_size(int height, int width) {
  if (height < 1 || width < 1) throw ParameterError("scene dimensions must be positive");
}

}  // namespace

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kPiecewiseConstant:
      return "piecewise-constant";
    case SceneKind::kPlanarRamp:
      return "planar-ramp";
    case SceneKind::kStepEdge:
      return "step-edge";
    case SceneKind::kTextured:
      return "textured";
  }
  return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
  for (SceneKind k : {SceneKind::kPiecewiseConstant, SceneKind::kPlanarRamp,
                      SceneKind::kStepEdge, SceneKind::kTextured}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown scene kind '" + std::string(name) + "'");
}

SyntheticScene gen_scene(SceneKind kind, int height, int width, std::uint64_t seed) {
  check_size(height, width);
  return SceneModel(kind, height, width, width, seed).render(0);
}

std::vector<SyntheticScene> gen_sequence(SceneKind kind, int height, int width,
                                         std::uint64_t seed, int frames, int shift_px) {
  check_size(height, width);
  if (frames < 1 || shift_px < 0) {
    throw ParameterError("sequence needs frames >= 1 and shift >= 0");
  }
  const SceneModel model(kind, height, width, width + (frames - 1) * shift_px, seed);
  std::vector<SyntheticScene> out;
  for (int f = 0; f < frames; ++f) out.push_back(model.render(f * shift_px));
  return out;
}

Frame to_frame(const SyntheticScene& scene, std::string name) {
  return {std::move(name), scene.rgb, scene.depth};
}

void save_frames(const std::vector<Frame>& frames, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  char name[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "%03zu", i);
    save_ppm(frames[i].rgb, dir / (std::string(name) + "_rgb.ppm"));
    save_pgm16(frames[i].depth, dir / (std::string(name) + "_depth.pgm"));
  }
}

std::vector<Frame> load_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError(dir.string() + " is not a directory");
  }
  std::map<std::string, std::filesystem::path> rgb_files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string fname = entry.path().filename().string();
    const std::string suffix = "_rgb.ppm";
    if (fname.size() > suffix.size() &&
        fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0) {
      rgb_files[fname.substr(0, fname.size() - suffix.size())] = entry.path();
    }
  }
  std::vector<Frame> frames;
  for (const auto& [stem, rgb_path] : rgb_files) {
    const auto depth_path = dir / (stem + "_depth.pgm");
    if (!std::filesystem::exists(depth_path)) continue;
    Frame f{stem, load_ppm(rgb_path), load_pgm16(depth_path)};
    if (f.rgb.width() != f.depth.width() || f.rgb.height() != f.depth.height()) {
      throw ParameterError("RGB and depth sizes differ for frame " + stem);
    }
    frames.push_back(std::move(f));
  }
  if (frames.empty()) throw IoError("no NNN_rgb.ppm / NNN_depth.pgm pairs in " + dir.string());
  return frames;
}

}  // namespace depthsamp
