#pragma once

#include <stdexcept>
#include <string>

namespace hoplab {

enum class PathLossKind { IdealHertz, ShiftedPower, Exponential };

/// Signal attenuation over distance. Positive, continuous, nonincreasing.
///   IdealHertz:   l(r) = min{1, r^-alpha}
///   ShiftedPower: l(r) = (K + r)^-alpha
///   Exponential:  l(r) = exp(-alpha r)
struct PathLossModel {
  PathLossKind kind = PathLossKind::IdealHertz;
  double alpha = 4.0;
  double shift = 1.0;  // K, ShiftedPower only

  static PathLossModel ideal_hertz(double alpha);
  static PathLossModel shifted_power(double shift, double alpha);
  static PathLossModel exponential(double alpha);

  double operator()(double r) const;
  /// dl/dr; for IdealHertz the plateau side is used at the kink.
  double derivative(double r) const;

  bool strictly_decreasing() const {
    return kind != PathLossKind::IdealHertz;
  }
  /// Whether l(|.|) is integrable over R^d.
  bool integrable(int dimension) const;

  std::string name() const;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dimension);

/// b = integral of l(|y|) over R^d. Closed form, cross-checkable against
/// quadrature. Throws std::domain_error when the integral diverges.
double total_pathloss_mass_b(const PathLossModel& model, int dimension);

}  // namespace hoplab
