#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace omniflow::kernels {

/// Accumulated endpoint-error statistics over the pixels selected by `valid`.
/// `outliers` counts pixels with squared endpoint error strictly above
/// `outlier_thresh_sq` (squaring keeps the comparison exact for float inputs).
struct EpeStats {
  double sum = 0.0;
  long long outliers = 0;
  long long count = 0;
};

/// Sum of per-pixel angular errors in radians over the selected pixels.
struct AngularSum {
  double sum = 0.0;
  long long count = 0;
};

/// One Jacobi sweep of the Horn-Schunck update on padded arrays.
///
/// All pointers address the interior origin of (height+2) x (width+2) buffers
/// with row stride `stride` = width + 2; the one-pixel border holds zeros.
/// `mask` is 1.0f inside the solve domain and 0.0f elsewhere, `inv_count` is
/// the reciprocal of the in-domain 4-neighbour count (0 where isolated), and
/// `inv_den` is 1 / (alpha^2 + Ix^2 + Iy^2). Out-of-domain outputs stay zero.
using JacobiStepFn = void (*)(const float* u, const float* v, float* u_next, float* v_next,
                              const float* ix, const float* iy, const float* it,
                              const float* inv_den, const float* inv_count, const float* mask,
                              int width, int height, int stride);

using EpeStatsFn = EpeStats (*)(const float* eu, const float* ev, const float* gu,
                                const float* gv, const uint8_t* valid, size_t n,
                                double outlier_thresh_sq);

using AngularSumFn = AngularSum (*)(const float* eu, const float* ev, const float* gu,
                                    const float* gv, const uint8_t* valid, size_t n);

struct KernelTable {
  const char* name;
  JacobiStepFn jacobi_step;
  EpeStatsFn epe_stats;
  AngularSumFn angular_sum;
};

const KernelTable& scalar_kernels();
bool have_avx2_kernels();
const KernelTable& avx2_kernels();  // throws std::runtime_error when unavailable

/// Active table used by the library. Defaults to the best table supported by
/// the running cpu; the OMNIFLOW_KERNEL environment variable ("scalar",
/// "avx2", "auto") overrides the default at first use.
const KernelTable& active_kernels();

/// Selects the active table by name ("auto" restores cpu detection).
/// Throws std::invalid_argument for unknown names and std::runtime_error when
/// the named table is not supported on this machine.
void select_kernels(const std::string& name);

std::vector<std::string> available_kernels();

}  // namespace omniflow::kernels
