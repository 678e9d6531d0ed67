#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

/// Which intensity measure the field integrates against.
enum class FieldSource { Mu, MuA, LebDelta };

/// Natural-spline interpolant of a tabulated radial function.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(Eigen::ArrayXd radii, Eigen::ArrayXd values);

  double operator()(double rho) const;
  double max_radius() const { return radii_.size() ? radii_[radii_.size() - 1] : 0.0; }
  const Eigen::ArrayXd& radii() const { return radii_; }
  const Eigen::ArrayXd& values() const { return values_; }

 private:
  Eigen::ArrayXd radii_, values_, second_;
};

/// Tabulated x -> integral of l(|z - x|) against a source measure supported
/// on a ball. The table is radial about the source ball's centre; evaluation
/// at an arbitrary point looks up |x - centre|. A MuA field is the base-W
/// table plus a weighted off-centre Delta table.
class InterferenceField {
 public:
  /// Builds the field; nodes are doubled until spline-vs-quadrature
  /// validation error is below tol (throws QuadratureFailure otherwise).
  static InterferenceField build(const NetworkGeometry& geom,
                                 const PathLossModel& model,
                                 FieldSource source, double tol = 1e-6,
                                 int initial_nodes = 256);

  double value_at(const Vec2& x) const;
  /// Convenience for rotationally invariant sources centred at the origin.
  double value_at_radius(double rho) const { return value_at(Vec2(rho, 0.0)); }

  FieldSource source() const { return source_; }
  double tolerance() const { return tol_; }
  double achieved_error() const { return achieved_error_; }
  const RadialTable& base_table() const { return base_; }

  /// Direct quadrature of the defining integral (no table); the oracle the
  /// table is validated against.
  static double direct_value(const NetworkGeometry& geom,
                             const PathLossModel& model, FieldSource source,
                             const Vec2& x, double tol = 1e-9);

  void write_csv(const std::string& path) const;

 private:
  FieldSource source_ = FieldSource::Mu;
  double tol_ = 0.0;
  double achieved_error_ = 0.0;
  // Base component: centred at base_center_ with weight base_weight_.
  RadialTable base_;
  Vec2 base_center_ = Vec2::Zero();
  double base_weight_ = 1.0;
  // Optional extra component (MuA): the dense subarea part.
  bool has_extra_ = false;
  RadialTable extra_;
  Vec2 extra_center_ = Vec2::Zero();
  double extra_weight_ = 0.0;
};

/// g(x, y) = field(y) / l(|x - y|): the limiting reciprocal-SIR penalty of a
/// hop x -> y. With a LebDelta field this evaluates the dense-subarea variant.
double g_eval(const InterferenceField& field, const PathLossModel& model,
              const Vec2& x, const Vec2& y);

}  // namespace hoplab
