#include "omniflow/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omniflow {

namespace {

struct Vec4 {
  double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
  Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, w + o.w}; }
  Vec4 operator*(double s) const { return {x * s, y * s, z * s, w * s}; }
};

}  // namespace

NurbsCurve::NurbsCurve(int degree, std::vector<Vec3> control_points, std::vector<double> weights,
                       std::vector<double> knots)
    : degree_(degree),
      control_points_(std::move(control_points)),
      weights_(std::move(weights)),
      knots_(std::move(knots)) {
  if (degree_ < 1) throw std::invalid_argument("nurbs: degree must be >= 1");
  if (control_points_.size() < static_cast<size_t>(degree_) + 1)
    throw std::invalid_argument("nurbs: need at least degree+1 control points");
  if (weights_.size() != control_points_.size())
    throw std::invalid_argument("nurbs: one weight per control point");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("nurbs: weights must be positive");
  if (knots_.size() != control_points_.size() + static_cast<size_t>(degree_) + 1)
    throw std::invalid_argument("nurbs: knot count must be points + degree + 1");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("nurbs: knots must be non-decreasing");
  if (!(domain_begin() < domain_end()))
    throw std::invalid_argument("nurbs: empty parameter domain");
}

NurbsCurve NurbsCurve::clamped(int degree, std::vector<Vec3> control_points) {
  const size_t n = control_points.size();
  if (degree < 1 || n < static_cast<size_t>(degree) + 1)
    throw std::invalid_argument("nurbs: need at least degree+1 control points");
  const size_t spans = n - static_cast<size_t>(degree);  // interior intervals
  std::vector<double> knots;
  knots.reserve(n + degree + 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (size_t i = 1; i < spans; ++i)
    knots.push_back(static_cast<double>(i) / static_cast<double>(spans));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return NurbsCurve(degree, std::move(control_points),
                    std::vector<double>(n, 1.0), std::move(knots));
}

int NurbsCurve::find_span(double t) const {
  const int n = static_cast<int>(control_points_.size()) - 1;
  if (t >= knots_[static_cast<size_t>(n) + 1]) return n;  // right-closed last span
  if (t <= knots_[static_cast<size_t>(degree_)]) return degree_;
  int lo = degree_, hi = n + 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (t < knots_[static_cast<size_t>(mid)] ? hi : lo) = mid;
  }
  return lo;
}

Vec3 NurbsCurve::evaluate(double t) const {
  if (!(t >= domain_begin() && t <= domain_end()))
    throw std::domain_error("nurbs: parameter outside the curve domain");
  const int span = find_span(t);
  const int p = degree_;

  // de Boor on (wx, wy, wz, w).
  std::vector<Vec4> d(static_cast<size_t>(p) + 1);
  for (int j = 0; j <= p; ++j) {
    const size_t idx = static_cast<size_t>(span - p + j);
    const double w = weights_[idx];
    const Vec3& c = control_points_[idx];
    d[static_cast<size_t>(j)] = {c.x * w, c.y * w, c.z * w, w};
  }
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const double left = knots_[static_cast<size_t>(span - p + j)];
      const double right = knots_[static_cast<size_t>(span + 1 + j - r)];
      const double denom = right - left;
      const double alpha = denom == 0.0 ? 0.0 : (t - left) / denom;
      d[static_cast<size_t>(j)] =
          d[static_cast<size_t>(j - 1)] * (1.0 - alpha) + d[static_cast<size_t>(j)] * alpha;
    }
  }
  const Vec4& h = d[static_cast<size_t>(p)];
  return {h.x / h.w, h.y / h.w, h.z / h.w};
}

ArcLengthTable::ArcLengthTable(const NurbsCurve& curve, int samples) {
  if (samples < 1) throw std::invalid_argument("arc length table: need at least one sample");
  const double t0 = curve.domain_begin();
  const double t1 = curve.domain_end();
  params_.resize(static_cast<size_t>(samples) + 1);
  cumulative_.resize(params_.size());
  Vec3 prev = curve.evaluate(t0);
  params_[0] = t0;
  cumulative_[0] = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * (static_cast<double>(i) / samples);
    const Vec3 p = curve.evaluate(t);
    params_[static_cast<size_t>(i)] = t;
    cumulative_[static_cast<size_t>(i)] = cumulative_[static_cast<size_t>(i) - 1] + (p - prev).norm();
    prev = p;
  }
}

double ArcLengthTable::param_at_length(double s) const {
  constexpr double kSlack = 1e-6;
  const double total = total_length();
  if (s < -kSlack || s > total + kSlack)
    throw std::domain_error("arc length outside the curve");
  if (s <= 0.0) return params_.front();
  if (s >= total) return params_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const size_t hi = static_cast<size_t>(it - cumulative_.begin());
  const size_t lo = hi - 1;
  const double span = cumulative_[hi] - cumulative_[lo];
  const double f = span == 0.0 ? 0.0 : (s - cumulative_[lo]) / span;
  return params_[lo] + (params_[hi] - params_[lo]) * f;
}

double ArcLengthTable::length_at_param(double t) const {
  if (!(t >= params_.front() && t <= params_.back()))
    throw std::domain_error("parameter outside the curve domain");
  const auto it = std::upper_bound(params_.begin(), params_.end(), t);
  size_t hi = static_cast<size_t>(it - params_.begin());
  if (hi >= params_.size()) hi = params_.size() - 1;
  const size_t lo = hi - 1;
  const double span = params_[hi] - params_[lo];
  const double f = span == 0.0 ? 0.0 : (t - params_[lo]) / span;
  return cumulative_[lo] + (cumulative_[hi] - cumulative_[lo]) * f;
}

}  // namespace omniflow
