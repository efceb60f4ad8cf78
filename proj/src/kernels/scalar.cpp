#include <algorithm>
#include <cmath>

#include "omniflow/kernels.hpp"

namespace omniflow::kernels {
namespace {

void jacobi_step_scalar(const float* u, const float* v, float* u_next, float* v_next,
                        const float* ix, const float* iy, const float* it, const float* inv_den,
                        const float* inv_count, const float* mask, int width, int height,
                        int stride) {
  for (int y = 0; y < height; ++y) {
    const size_t row = static_cast<size_t>(y) * stride;
    for (int x = 0; x < width; ++x) {
      const size_t i = row + x;
      const float ubar = (u[i - 1] + u[i + 1] + u[i - stride] + u[i + stride]) * inv_count[i];
      const float vbar = (v[i - 1] + v[i + 1] + v[i - stride] + v[i + stride]) * inv_count[i];
      const float t = (ix[i] * ubar + iy[i] * vbar + it[i]) * inv_den[i];
      u_next[i] = (ubar - ix[i] * t) * mask[i];
      v_next[i] = (vbar - iy[i] * t) * mask[i];
    }
  }
}

EpeStats epe_stats_scalar(const float* eu, const float* ev, const float* gu, const float* gv,
                          const uint8_t* valid, size_t n, double outlier_thresh_sq) {
  EpeStats s;
  for (size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    const double du = static_cast<double>(eu[i]) - static_cast<double>(gu[i]);
    const double dv = static_cast<double>(ev[i]) - static_cast<double>(gv[i]);
    const double sq = du * du + dv * dv;
    s.sum += std::sqrt(sq);
    s.outliers += sq > outlier_thresh_sq ? 1 : 0;
    s.count += 1;
  }
  return s;
}

AngularSum angular_sum_scalar(const float* eu, const float* ev, const float* gu, const float* gv,
                              const uint8_t* valid, size_t n) {
  AngularSum s;
  for (size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    s.count += 1;
    // Equal vectors are exactly parallel; acos of the rounded cosine is not 0.
    if (eu[i] == gu[i] && ev[i] == gv[i]) continue;
    const double ue = eu[i], ve = ev[i], ug = gu[i], vg = gv[i];
    const double num = 1.0 + ue * ug + ve * vg;
    const double den = std::sqrt(1.0 + ue * ue + ve * ve) * std::sqrt(1.0 + ug * ug + vg * vg);
    s.sum += std::acos(std::clamp(num / den, -1.0, 1.0));
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", jacobi_step_scalar, epe_stats_scalar,
                                 angular_sum_scalar};
  return table;
}

}  // namespace omniflow::kernels
