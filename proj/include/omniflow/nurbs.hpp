#pragma once

#include <vector>

#include "omniflow/vec.hpp"

namespace omniflow {

/// Rational B-spline curve in 3D, evaluated with de Boor's recurrence on
/// homogeneous coordinates.
class NurbsCurve {
 public:
  /// Validates: degree >= 1, at least degree+1 control points, one positive
  /// weight per point, knots.size() == points + degree + 1, knots
  /// non-decreasing with a non-empty domain.
  NurbsCurve(int degree, std::vector<Vec3> control_points, std::vector<double> weights,
             std::vector<double> knots);

  /// Unit-weight curve with a clamped uniform knot vector spanning [0, 1].
  static NurbsCurve clamped(int degree, std::vector<Vec3> control_points);

  int degree() const { return degree_; }
  const std::vector<Vec3>& control_points() const { return control_points_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& knots() const { return knots_; }

  double domain_begin() const { return knots_[static_cast<size_t>(degree_)]; }
  double domain_end() const { return knots_[knots_.size() - 1 - static_cast<size_t>(degree_)]; }

  /// Curve point at parameter t. Throws std::domain_error outside the domain.
  Vec3 evaluate(double t) const;

 private:
  int find_span(double t) const;

  int degree_;
  std::vector<Vec3> control_points_;
  std::vector<double> weights_;
  std::vector<double> knots_;
};

/// Chord-length table sampled uniformly in parameter, supporting the
/// arc-length-to-parameter inversion used for constant-speed traversal.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(const NurbsCurve& curve, int samples = 1 << 17);

  double total_length() const { return cumulative_.back(); }

  /// Parameter whose arc length from the curve start equals s. Requests up
  /// to 1e-6 beyond the total length clamp to the end; anything further (or
  /// below -1e-6) throws std::domain_error.
  double param_at_length(double s) const;

  /// Arc length from the curve start to parameter t.
  double length_at_param(double t) const;

 private:
  std::vector<double> params_;
  std::vector<double> cumulative_;
};

}  // namespace omniflow
