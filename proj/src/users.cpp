#include "hoplab/users.hpp"

#include <cmath>
#include <stdexcept>

#include "hoplab/rng.hpp"

namespace hoplab {

Vec2 sample_in_ball(int dimension, double radius, Rng& rng) {
  if (dimension == 1) {
    return Vec2(rng.uniform(-radius, radius), 0.0);
  }
  const double rho = radius * std::sqrt(rng.uniform());
  const double theta = rng.uniform(0.0, 6.283185307179586476925286766559);
  return Vec2(rho * std::cos(theta), rho * std::sin(theta));
}

UserConfiguration sample_users(const NetworkGeometry& geom, double lambda,
                               std::uint64_t seed) {
  if (lambda <= 0.0) throw std::invalid_argument("sample_users: lambda <= 0");
  geom.validate();
  Rng rng(seed);
  UserConfiguration users;
  users.lambda = lambda;
  users.dimension = geom.dimension;
  const std::uint64_t n = rng.poisson(lambda * geom.mu_total());
  users.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    users.points.push_back(sample_in_ball(geom.dimension, geom.radius, rng));
  }
  return users;
}

double empirical_interference(const UserConfiguration& users,
                              const PathLossModel& model, const Vec2& x) {
  double sum = 0.0;
  for (const Vec2& p : users.points) sum += model((p - x).norm());
  return sum / users.lambda;
}

double sir(const UserConfiguration& users, int i, const Vec2& x,
           const PathLossModel& model) {
  if (users.points.empty()) {
    throw std::domain_error("sir: undefined for an empty configuration");
  }
  if (i < 0 || i >= users.count()) {
    throw std::invalid_argument("sir: user index out of range");
  }
  return model((users.points[i] - x).norm()) /
         empirical_interference(users, model, x);
}

Eigen::MatrixXd sir_inverse_table(const UserConfiguration& users,
                                  const PathLossModel& model) {
  const int n = users.count();
  Eigen::MatrixXd table(n, n + 1);
  for (int j = 0; j <= n; ++j) {
    const Vec2 rx = j < n ? users.points[j] : Vec2(Vec2::Zero());
    const double interference = empirical_interference(users, model, rx);
    for (int i = 0; i < n; ++i) {
      table(i, j) = interference / model((users.points[i] - rx).norm());
    }
  }
  return table;
}

}  // namespace hoplab
