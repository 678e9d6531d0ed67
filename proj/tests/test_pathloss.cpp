#include <doctest.h>

#include <cmath>

#include "hoplab/pathloss.hpp"
#include "hoplab/quadrature.hpp"
#include "hoplab/rng.hpp"

using namespace hoplab;

namespace {

/// Quadrature oracle for b: integrate the radial profile on doubling windows
/// until the increment is negligible. Independent of the closed forms.
double oracle_total_mass(const PathLossModel& model, int d) {
  const double surface = d * unit_ball_volume(d);
  auto radial = [&](double r) {
    return surface * std::pow(r, d - 1) * model(r);
  };
  double total = adaptive_simpson(radial, 0.0, 1.0, 1e-13);
  double lo = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double inc = adaptive_simpson(radial, lo, 2.0 * lo, 1e-13);
    total += inc;
    lo *= 2.0;
    if (lo > 1e3 && inc < 1e-12 * total) break;
  }
  return total;
}

}  // namespace

TEST_CASE("path loss point values") {
  const PathLossModel hertz = PathLossModel::ideal_hertz(4.0);
  CHECK(hertz(0.5) == doctest::Approx(1.0));
  CHECK(hertz(2.0) == doctest::Approx(0.0625));
  const PathLossModel shifted = PathLossModel::shifted_power(1.0, 4.0);
  CHECK(shifted(1.0) == doctest::Approx(0.0625));
  const PathLossModel expo = PathLossModel::exponential(2.0);
  CHECK(expo(0.0) == doctest::Approx(1.0));
  CHECK(expo(1.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("path loss is nonincreasing, strictly for smooth kinds") {
  Rng rng(42);
  const PathLossModel models[] = {PathLossModel::ideal_hertz(3.0),
                                  PathLossModel::shifted_power(0.5, 2.5),
                                  PathLossModel::exponential(1.2)};
  for (const PathLossModel& model : models) {
    for (int i = 0; i < 200; ++i) {
      double r1 = rng.uniform(0.0, 10.0);
      double r2 = rng.uniform(0.0, 10.0);
      if (r1 > r2) std::swap(r1, r2);
      if (r1 == r2) continue;
      CHECK(model(r1) >= model(r2));
      if (model.strictly_decreasing()) CHECK(model(r1) > model(r2));
    }
  }
  CHECK(!PathLossModel::ideal_hertz(3.0).strictly_decreasing());
  CHECK(PathLossModel::shifted_power(1.0, 3.0).strictly_decreasing());
  CHECK(PathLossModel::exponential(3.0).strictly_decreasing());
}

TEST_CASE("total mass b closed forms") {
  CHECK(total_pathloss_mass_b(PathLossModel::ideal_hertz(4.0), 1) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(total_pathloss_mass_b(PathLossModel::ideal_hertz(2.0), 1) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(total_pathloss_mass_b(PathLossModel::ideal_hertz(1.0), 1),
                  std::domain_error);
  CHECK_THROWS_AS(
      total_pathloss_mass_b(PathLossModel::shifted_power(1.0, 2.0), 2),
      std::domain_error);
}

TEST_CASE("total mass b agrees with quadrature to 1e-9 relative") {
  const PathLossModel models[] = {PathLossModel::ideal_hertz(4.0),
                                  PathLossModel::ideal_hertz(2.7),
                                  PathLossModel::shifted_power(1.0, 4.0),
                                  PathLossModel::shifted_power(0.7, 3.2),
                                  PathLossModel::exponential(0.9)};
  for (const PathLossModel& model : models) {
    for (int d = 1; d <= 2; ++d) {
      if (!model.integrable(d)) continue;
      const double closed = total_pathloss_mass_b(model, d);
      const double oracle = oracle_total_mass(model, d);
      CHECK(closed == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("derivative matches finite differences away from kinks") {
  Rng rng(7);
  const PathLossModel models[] = {PathLossModel::ideal_hertz(4.0),
                                  PathLossModel::shifted_power(1.0, 4.0),
                                  PathLossModel::exponential(1.5)};
  for (const PathLossModel& model : models) {
    for (int i = 0; i < 50; ++i) {
      double r = rng.uniform(0.05, 5.0);
      if (model.kind == PathLossKind::IdealHertz && std::abs(r - 1.0) < 0.05) {
        continue;
      }
      const double h = 1e-6;
      const double fd = (model(r + h) - model(r - h)) / (2.0 * h);
      CHECK(model.derivative(r) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
