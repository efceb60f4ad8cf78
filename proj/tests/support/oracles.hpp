#pragma once

// Independent reference implementations used to check library results. They
// favour the most literal textbook formulation over speed and share no code
// with the library internals they validate.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "omniflow/flowio.hpp"
#include "omniflow/grid.hpp"
#include "omniflow/nurbs.hpp"
#include "omniflow/vec.hpp"

namespace omniflow::testing {

/// Cox-de Boor basis function N_{i,p}(t) by direct recursion. The last span
/// is closed on the right so the curve end point is reachable.
inline double cox_de_boor_basis(size_t i, int p, double t, const std::vector<double>& knots,
                                double domain_end) {
  if (p == 0) {
    if (knots[i] <= t && t < knots[i + 1]) return 1.0;
    if (t == domain_end && knots[i] < knots[i + 1] && knots[i + 1] == domain_end) return 1.0;
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double d1 = knots[i + static_cast<size_t>(p)] - knots[i];
  if (d1 > 0.0)
    left = (t - knots[i]) / d1 * cox_de_boor_basis(i, p - 1, t, knots, domain_end);
  const double d2 = knots[i + static_cast<size_t>(p) + 1] - knots[i + 1];
  if (d2 > 0.0)
    right = (knots[i + static_cast<size_t>(p) + 1] - t) / d2 *
            cox_de_boor_basis(i + 1, p - 1, t, knots, domain_end);
  return left + right;
}

/// Rational curve point as the weighted basis sum over all control points.
inline Vec3 nurbs_point_by_basis_sum(const NurbsCurve& curve, double t) {
  const auto& pts = curve.control_points();
  const auto& w = curve.weights();
  const auto& knots = curve.knots();
  const double end = curve.domain_end();
  double sx = 0.0, sy = 0.0, sz = 0.0, sw = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double b = cox_de_boor_basis(i, curve.degree(), t, knots, end);
    if (b == 0.0) continue;
    sx += b * w[i] * pts[i].x;
    sy += b * w[i] * pts[i].y;
    sz += b * w[i] * pts[i].z;
    sw += b * w[i];
  }
  return {sx / sw, sy / sw, sz / sw};
}

/// Arc length of curve between parameters by composite Simpson quadrature of
/// the finite-difference speed. Assumes t0 <= t1 inside the curve domain.
inline double arc_length_by_quadrature(const NurbsCurve& curve, double t0, double t1,
                                       int intervals = 256) {
  if (intervals % 2 != 0) ++intervals;
  const double lo = curve.domain_begin();
  const double hi = curve.domain_end();
  const double h = std::max((hi - lo) * 1e-7, 1e-12);
  auto speed = [&](double t) {
    const double a = std::max(lo, t - h);
    const double b = std::min(hi, t + h);
    return (curve.evaluate(b) - curve.evaluate(a)).norm() / (b - a);
  };
  const double step = (t1 - t0) / intervals;
  if (step == 0.0) return 0.0;
  double sum = speed(t0) + speed(t1);
  for (int i = 1; i < intervals; ++i) sum += speed(t0 + step * i) * (i % 2 ? 4.0 : 2.0);
  return sum * step / 3.0;
}

struct FlowErrorSummary {
  double aae_deg = 0.0;
  double aepe = 0.0;
  double fl_pct = 0.0;
  long long outliers = 0;
  long long count = 0;
};

/// Plain per-pixel recomputation of the error metrics over `select`.
inline FlowErrorSummary flow_errors_brute_force(const FlowField& est, const FlowField& gt,
                                                const Grid<uint8_t>& select,
                                                double outlier_threshold = 3.0) {
  FlowErrorSummary s;
  double angle_sum = 0.0, epe_sum = 0.0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!select.at(x, y)) continue;
      const double ue = est.u(x, y), ve = est.v(x, y);
      const double ug = gt.u(x, y), vg = gt.v(x, y);
      if (ue != ug || ve != vg) {  // equal vectors carry a zero angle exactly
        const double num = 1.0 + ue * ug + ve * vg;
        const double den =
            std::sqrt(1.0 + ue * ue + ve * ve) * std::sqrt(1.0 + ug * ug + vg * vg);
        angle_sum += std::acos(std::clamp(num / den, -1.0, 1.0));
      }
      const double du = ue - ug, dv = ve - vg;
      const double epe = std::sqrt(du * du + dv * dv);
      epe_sum += epe;
      if (epe > outlier_threshold) ++s.outliers;
      ++s.count;
    }
  }
  if (s.count > 0) {
    s.aae_deg = angle_sum / static_cast<double>(s.count) * 180.0 / std::numbers::pi;
    s.aepe = epe_sum / static_cast<double>(s.count);
    s.fl_pct = 100.0 * static_cast<double>(s.outliers) / static_cast<double>(s.count);
  }
  return s;
}

}  // namespace omniflow::testing
