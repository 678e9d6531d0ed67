#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

/// A finite user cloud in W together with the density parameter lambda that
/// scales the SIR denominator.
struct UserConfiguration {
  double lambda = 1.0;
  int dimension = 1;
  std::vector<Vec2> points;

  int count() const { return static_cast<int>(points.size()); }
};

/// Poisson(lambda mu(W)) many users, i.i.d. mu/mu(W) positions.
UserConfiguration sample_users(const NetworkGeometry& geom, double lambda,
                               std::uint64_t seed);

/// One uniform position in the d-ball of the given radius.
Vec2 sample_in_ball(int dimension, double radius, class Rng& rng);

/// Empirical interference at x: (1/lambda) sum_j l(|X_j - x|), i.e. the
/// integral of l(|. - x|) against the empirical measure L_lambda.
double empirical_interference(const UserConfiguration& users,
                              const PathLossModel& model, const Vec2& x);

/// SIR of a transmission from user i to position x; the denominator includes
/// the transmitter's own term. Throws on an empty configuration.
double sir(const UserConfiguration& users, int i, const Vec2& x,
           const PathLossModel& model);

/// Precomputed reciprocal SIR values for every (transmitter, receiver) pair;
/// column N is the receiver at the origin.
Eigen::MatrixXd sir_inverse_table(const UserConfiguration& users,
                                  const PathLossModel& model);

}  // namespace hoplab
