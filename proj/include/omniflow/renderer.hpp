#pragma once

#include "omniflow/camera.hpp"
#include "omniflow/flowio.hpp"
#include "omniflow/grid.hpp"
#include "omniflow/image.hpp"
#include "omniflow/scene.hpp"

namespace omniflow {

enum class HitKind { cube, floor, horizon };

/// First intersection along a ray. For cube hits `point` is in cube-local
/// coordinates (hit minus centre) and `face` identifies the side
/// (0..5 = +x, -x, +y, -y, +z, -z); for floor hits `point` is in world
/// coordinates. Horizon means nothing within the far limit was hit; its
/// distance is +infinity.
struct Hit {
  HitKind kind = HitKind::horizon;
  int face = -1;
  Vec3 point{};
  double distance = 0.0;
};

inline constexpr double kFloorZ = -1.0;    // static ground plane
inline constexpr double kFarLimit = 100.0; // metres; beyond lies the horizon

Hit cast_ray(const Vec3& origin, const Vec3& dir, const CubeState& cube);

struct FrameRender {
  Image8 image;           // rgb
  Grid<uint8_t> fg_mask;  // 255 where the cube is visible, 0 elsewhere
};

/// Renders the given frame: cube over the checkerboard floor, black outside
/// the image circle. Deterministic in the spec (including its seed).
FrameRender render_frame(const SequenceSpec& spec, int frame);

/// Analytic forward flow from `frame` to `frame + 1`, in pixels. Background
/// (floor/horizon) pixels are zero because the scene is static apart from
/// the cube; pixels outside the image circle are invalid.
FlowField ground_truth_flow(const SequenceSpec& spec, int frame);

/// Flow between two explicit cube placements seen by `camera`. The cube
/// moves by pure translation, so both states must share one half extent.
FlowField ground_truth_flow_between(const FisheyeCamera& camera, const CubeState& from,
                                    const CubeState& to);

}  // namespace omniflow
