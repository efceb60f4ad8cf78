#pragma once

#include "omniflow/flowio.hpp"
#include "omniflow/grid.hpp"
#include "omniflow/image.hpp"

namespace omniflow {

/// Horn-Schunck settings. `alpha` weighs the smoothness term against the
/// data term for intensities in [0, 255].
struct HSParams {
  double alpha = 15.0;
  int iterations = 400;     // Jacobi sweeps per warp
  int pyramid_levels = 4;   // capped so the coarsest level keeps >= 8 px
  int warps_per_level = 2;

  void validate() const;
};

struct HSResult {
  FlowField flow;                // valid exactly on the solve domain
  bool degenerate = false;       // constant inputs (or empty domain): zero flow
  float final_residual = 0.0f;   // max update of one extra sweep at the finest level
};

/// Luma in [0, 255] (0.299 r + 0.587 g + 0.114 b; grayscale passes through).
Grid<float> luma_from_rgb(const Image8& image);

/// Coarse-to-fine Horn-Schunck between two frames. Inputs are band limited
/// with a 5-tap binomial presmooth (and again before each pyramid
/// decimation). Each pyramid level runs `warps_per_level` linearizations;
/// every warp solves the Jacobi iteration
///   u <- ubar - Ix (Ix ubar + Iy vbar + It) / (alpha^2 + Ix^2 + Iy^2)
/// for the flow increment, with ubar/vbar the masked 4-neighbour means.
/// `domain` selects the pixels being solved (the image circle); flow is zero
/// and marked invalid outside it.
HSResult hs_estimate(const Grid<float>& frame0, const Grid<float>& frame1,
                     const Grid<uint8_t>& domain, const HSParams& params = {});

}  // namespace omniflow
