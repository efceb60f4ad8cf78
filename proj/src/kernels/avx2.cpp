#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "omniflow/kernels.hpp"

// Vector variants of the reference kernels in scalar.cpp. The reductions
// mirror the scalar double-precision arithmetic operation for operation
// (mul/add, no fma) so that outlier and validity counts agree exactly; only
// the order of the final sums differs. The Jacobi sweep uses fma and is
// equivalence-tested against the scalar kernel with a small tolerance.

namespace omniflow::kernels {
namespace {

inline __m256d load4_as_double(const float* p) {
  return _mm256_cvtps_pd(_mm_loadu_ps(p));
}

inline __m256d valid4_as_mask(const uint8_t* p) {
  uint32_t packed;
  std::memcpy(&packed, p, 4);
  const __m128i bytes = _mm_cvtsi32_si128(static_cast<int>(packed));
  const __m128i lanes = _mm_cvtepu8_epi32(bytes);
  const __m256d values = _mm256_cvtepi32_pd(lanes);
  return _mm256_cmp_pd(values, _mm256_setzero_pd(), _CMP_NEQ_OQ);
}

void jacobi_step_avx2(const float* u, const float* v, float* u_next, float* v_next,
                      const float* ix, const float* iy, const float* it, const float* inv_den,
                      const float* inv_count, const float* mask, int width, int height,
                      int stride) {
  for (int y = 0; y < height; ++y) {
    const size_t row = static_cast<size_t>(y) * stride;
    int x = 0;
    for (; x + 8 <= width; x += 8) {
      const size_t i = row + x;
      const __m256 invc = _mm256_loadu_ps(inv_count + i);
      const __m256 usum = _mm256_add_ps(
          _mm256_add_ps(_mm256_loadu_ps(u + i - 1), _mm256_loadu_ps(u + i + 1)),
          _mm256_add_ps(_mm256_loadu_ps(u + i - stride), _mm256_loadu_ps(u + i + stride)));
      const __m256 vsum = _mm256_add_ps(
          _mm256_add_ps(_mm256_loadu_ps(v + i - 1), _mm256_loadu_ps(v + i + 1)),
          _mm256_add_ps(_mm256_loadu_ps(v + i - stride), _mm256_loadu_ps(v + i + stride)));
      const __m256 ubar = _mm256_mul_ps(usum, invc);
      const __m256 vbar = _mm256_mul_ps(vsum, invc);
      const __m256 ixv = _mm256_loadu_ps(ix + i);
      const __m256 iyv = _mm256_loadu_ps(iy + i);
      const __m256 t = _mm256_mul_ps(
          _mm256_fmadd_ps(ixv, ubar, _mm256_fmadd_ps(iyv, vbar, _mm256_loadu_ps(it + i))),
          _mm256_loadu_ps(inv_den + i));
      const __m256 maskv = _mm256_loadu_ps(mask + i);
      _mm256_storeu_ps(u_next + i, _mm256_mul_ps(_mm256_fnmadd_ps(ixv, t, ubar), maskv));
      _mm256_storeu_ps(v_next + i, _mm256_mul_ps(_mm256_fnmadd_ps(iyv, t, vbar), maskv));
    }
    for (; x < width; ++x) {
      const size_t i = row + x;
      const float ubar = (u[i - 1] + u[i + 1] + u[i - stride] + u[i + stride]) * inv_count[i];
      const float vbar = (v[i - 1] + v[i + 1] + v[i - stride] + v[i + stride]) * inv_count[i];
      const float t = (ix[i] * ubar + iy[i] * vbar + it[i]) * inv_den[i];
      u_next[i] = (ubar - ix[i] * t) * mask[i];
      v_next[i] = (vbar - iy[i] * t) * mask[i];
    }
  }
}

EpeStats epe_stats_avx2(const float* eu, const float* ev, const float* gu, const float* gv,
                        const uint8_t* valid, size_t n, double outlier_thresh_sq) {
  EpeStats s;
  const size_t n4 = n & ~static_cast<size_t>(3);
  const __m256d thresh = _mm256_set1_pd(outlier_thresh_sq);
  __m256d sum = _mm256_setzero_pd();
  for (size_t i = 0; i < n4; i += 4) {
    const __m256d mask = valid4_as_mask(valid + i);
    const __m256d du = _mm256_sub_pd(load4_as_double(eu + i), load4_as_double(gu + i));
    const __m256d dv = _mm256_sub_pd(load4_as_double(ev + i), load4_as_double(gv + i));
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(du, du), _mm256_mul_pd(dv, dv));
    sum = _mm256_add_pd(sum, _mm256_and_pd(_mm256_sqrt_pd(sq), mask));
    const __m256d out = _mm256_and_pd(_mm256_cmp_pd(sq, thresh, _CMP_GT_OQ), mask);
    s.outliers += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(out)));
    s.count += __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(mask)));
  }
  alignas(32) double lanes[4];
  _mm256_storeu_pd(lanes, sum);
  s.sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (n4 < n) {
    const EpeStats tail = scalar_kernels().epe_stats(eu + n4, ev + n4, gu + n4, gv + n4,
                                                     valid + n4, n - n4, outlier_thresh_sq);
    s.sum += tail.sum;
    s.outliers += tail.outliers;
    s.count += tail.count;
  }
  return s;
}

AngularSum angular_sum_avx2(const float* eu, const float* ev, const float* gu, const float* gv,
                            const uint8_t* valid, size_t n) {
  AngularSum s;
  const size_t n4 = n & ~static_cast<size_t>(3);
  const __m256d one = _mm256_set1_pd(1.0);
  for (size_t i = 0; i < n4; i += 4) {
    const __m256d ue = load4_as_double(eu + i);
    const __m256d ve = load4_as_double(ev + i);
    const __m256d ug = load4_as_double(gu + i);
    const __m256d vg = load4_as_double(gv + i);
    const __m256d num =
        _mm256_add_pd(_mm256_add_pd(one, _mm256_mul_pd(ue, ug)), _mm256_mul_pd(ve, vg));
    const __m256d na =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(one, _mm256_mul_pd(ue, ue)),
                                     _mm256_mul_pd(ve, ve)));
    const __m256d nb =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(one, _mm256_mul_pd(ug, ug)),
                                     _mm256_mul_pd(vg, vg)));
    const __m256d arg = _mm256_max_pd(
        _mm256_set1_pd(-1.0),
        _mm256_min_pd(one, _mm256_div_pd(num, _mm256_mul_pd(na, nb))));
    alignas(32) double lanes[4];
    _mm256_storeu_pd(lanes, arg);
    // acos stays scalar (libm); lane-order accumulation matches the
    // reference kernel bit for bit, including its zero-angle shortcut for
    // equal vectors.
    for (int lane = 0; lane < 4; ++lane) {
      if (!valid[i + lane]) continue;
      s.count += 1;
      if (eu[i + lane] == gu[i + lane] && ev[i + lane] == gv[i + lane]) continue;
      s.sum += std::acos(lanes[lane]);
    }
  }
  if (n4 < n) {
    const AngularSum tail =
        scalar_kernels().angular_sum(eu + n4, ev + n4, gu + n4, gv + n4, valid + n4, n - n4);
    s.sum += tail.sum;
    s.count += tail.count;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", jacobi_step_avx2, epe_stats_avx2, angular_sum_avx2};
  return table;
}

}  // namespace omniflow::kernels
