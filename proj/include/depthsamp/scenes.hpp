#pragma once

// Synthetic RGB-D scenes standing in for real captures, and the paired
// NNN_rgb.ppm / NNN_depth.pgm directory layout.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

enum class SceneKind { kPiecewiseConstant, kPlanarRamp, kStepEdge, kTextured };

std::string_view to_string(SceneKind kind);
// Throws ParameterError for unknown names.
SceneKind parse_scene_kind(std::string_view name);

struct SyntheticScene {
  SceneKind kind = SceneKind::kPiecewiseConstant;
  RgbImage rgb{1, 1};
  DepthMap depth{1, 1};
  // Planar ramp only: depth = ramp[0] + ramp[1] * x + ramp[2] * y (mm).
  std::array<double, 3> ramp{};
};

// A named RGB + ground-truth depth pair; the unit the experiments run on.
struct Frame {
  std::string name;
  RgbImage rgb{1, 1};
  DepthMap depth{1, 1};
};

// Deterministic per seed.
//  piecewise-constant: 3-8 Voronoi regions, each with its own color and depth
//    in [500, 20000] mm; color edges coincide with depth edges.
//  planar-ramp: depth affine in (x, y), smooth shading.
//  step-edge: two half-planes split by a random line.
//  textured: smooth depth under a high-frequency color texture.
SyntheticScene gen_scene(SceneKind kind, int height, int width, std::uint64_t seed);

// Frames of one scene translating `shift_px` pixels per frame to the left
// (content moves left, camera pans right). shift_px = 0 gives a static
// sequence.
std::vector<SyntheticScene> gen_sequence(SceneKind kind, int height, int width,
                                         std::uint64_t seed, int frames, int shift_px);

Frame to_frame(const SyntheticScene& scene, std::string name);

// Writes frame i as NNN_rgb.ppm / NNN_depth.pgm with NNN = i, zero padded.
void save_frames(const std::vector<Frame>& frames, const std::filesystem::path& dir);
// Loads every NNN_rgb.ppm with a matching NNN_depth.pgm, sorted by name.
std::vector<Frame> load_frames(const std::filesystem::path& dir);

}  // namespace depthsamp
