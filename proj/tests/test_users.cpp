#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hoplab/rng.hpp"
#include "hoplab/users.hpp"

using namespace hoplab;

TEST_CASE("sampled count has the Poisson mean lambda mu(W)") {
  const NetworkGeometry geom(1, 5.0, 1.0, 0.0, 2);
  CHECK(geom.mu_total() == doctest::Approx(10.0));
  double total = 0.0;
  const int reps = 300;
  for (int i = 0; i < reps; ++i) {
    total += sample_users(geom, 10.0, 1000 + i).count();
  }
  // Mean 100, sd 10: the average of 300 draws stays within 3 of the mean.
  CHECK(std::abs(total / reps - 100.0) < 3.0);
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  const NetworkGeometry geom(2, 3.0, 1.0, 0.0, 2);
  const UserConfiguration a = sample_users(geom, 5.0, 77);
  const UserConfiguration b = sample_users(geom, 5.0, 77);
  REQUIRE(a.count() == b.count());
  for (int i = 0; i < a.count(); ++i) {
    CHECK(a.points[i] == b.points[i]);
  }
  const UserConfiguration c = sample_users(geom, 5.0, 78);
  CHECK(a.count() != c.count());
}

TEST_CASE("positions pass a Kolmogorov-Smirnov uniformity check") {
  const NetworkGeometry geom(1, 5.0, 1.0, 0.0, 2);
  UserConfiguration users = sample_users(geom, 1000.0, 4242);
  REQUIRE(users.count() > 5000);
  std::vector<double> xs;
  xs.reserve(users.count());
  for (const Vec2& p : users.points) xs.push_back(p.x());
  std::sort(xs.begin(), xs.end());
  double d_stat = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = (xs[i] + 5.0) / 10.0;
    d_stat = std::max(d_stat, std::abs(cdf - (i + 1) / n));
    d_stat = std::max(d_stat, std::abs(cdf - i / n));
  }
  const double critical_1pct = 1.628 / std::sqrt(n);
  CHECK(d_stat < critical_1pct);
}

TEST_CASE("SIR spot values") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  SUBCASE("single user sees ratio one") {
    UserConfiguration users{1.0, 1, {Vec2(2.0, 0.0)}};
    CHECK(sir(users, 0, Vec2(0.5, 0.0), model) == doctest::Approx(1.0));
  }
  SUBCASE("two equidistant users split the channel") {
    UserConfiguration users{1.0, 1, {Vec2(-1.0, 0.0), Vec2(1.0, 0.0)}};
    CHECK(sir(users, 0, origin(), model) == doctest::Approx(0.5));
    CHECK(sir(users, 1, origin(), model) == doctest::Approx(0.5));
  }
  SUBCASE("three users, hand-evaluated denominator") {
    UserConfiguration users{
        1.0, 1, {Vec2(-1.0, 0.0), Vec2(0.0, 0.0), Vec2(2.0, 0.0)}};
    // Transmitter at 0, receiver at 1: l(1) / (l(2) + l(1) + l(1)).
    const double expected = 1.0 / (1.0 / 16.0 + 1.0 + 1.0);
    CHECK(sir(users, 1, Vec2(1.0, 0.0), model) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("empty configuration is an error") {
    UserConfiguration users{1.0, 1, {}};
    CHECK_THROWS_AS(sir(users, 0, origin(), model), std::exception);
  }
}

TEST_CASE("the two SIR computation paths agree to 1e-12") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const NetworkGeometry geom(2, 4.0, 1.0, 0.0, 2);
  const UserConfiguration users = sample_users(geom, 3.0, 99);
  REQUIRE(users.count() > 3);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int i = static_cast<int>(rng.uniform_index(users.count()));
    const Vec2 x = sample_in_ball(2, 4.0, rng);
    // Direct evaluation of the defining formula.
    double denom = 0.0;
    for (const Vec2& p : users.points) denom += model((p - x).norm());
    denom /= users.lambda;
    const double direct = model((users.points[i] - x).norm()) / denom;
    // Empirical-measure route: l / integral of l against L_lambda.
    const double via_field =
        model((users.points[i] - x).norm()) /
        empirical_interference(users, model, x);
    CHECK(sir(users, i, x, model) ==
          doctest::Approx(direct).epsilon(1e-12));
    CHECK(via_field == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("reciprocal SIR table matches pointwise evaluation") {
  const PathLossModel model = PathLossModel::shifted_power(1.0, 3.0);
  const NetworkGeometry geom(1, 3.0, 1.0, 0.0, 2);
  const UserConfiguration users = sample_users(geom, 2.0, 123);
  REQUIRE(users.count() >= 2);
  const Eigen::MatrixXd table = sir_inverse_table(users, model);
  for (int i = 0; i < users.count(); ++i) {
    CHECK(table(i, users.count()) ==
          doctest::Approx(1.0 / sir(users, i, origin(), model))
              .epsilon(1e-13));
    for (int j = 0; j < users.count(); ++j) {
      CHECK(table(i, j) ==
            doctest::Approx(1.0 / sir(users, i, users.points[j], model))
                .epsilon(1e-13));
    }
  }
}
