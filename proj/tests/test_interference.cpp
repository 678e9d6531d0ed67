#include <doctest.h>

#include <cmath>

#include "hoplab/interference.hpp"
#include "hoplab/rng.hpp"

using namespace hoplab;

namespace {

NetworkGeometry line_geom() { return NetworkGeometry(1, 5.0, 1.0, 0.0, 2); }

NetworkGeometry disk_geom() { return NetworkGeometry(2, 7.0, 1.0, 0.0, 2); }

}  // namespace

TEST_CASE("line-segment field reproduces the reference interference values") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const InterferenceField field =
      InterferenceField::build(line_geom(), model, FieldSource::Mu, 1e-7);
  // Exact antiderivative: int_0^R min(1, u^-4) du = 1 + (1 - R^-3)/3.
  const double exact_center = 2.0 * (1.0 + (1.0 - std::pow(5.0, -3.0)) / 3.0);
  CHECK(field.value_at_radius(0.0) ==
        doctest::Approx(exact_center).epsilon(1e-8));
  CHECK(field.value_at_radius(0.0) == doctest::Approx(2.6613).epsilon(4e-4));
  CHECK(field.value_at_radius(4.0) == doctest::Approx(2.3328).epsilon(4e-4));
}

TEST_CASE("disk field value at the centre matches the closed form") {
  const PathLossModel model = PathLossModel::shifted_power(1.0, 4.0);
  const InterferenceField field =
      InterferenceField::build(disk_geom(), model, FieldSource::Mu, 1e-6);
  // 2 pi int_0^7 rho (1+rho)^-4 drho in closed form.
  auto anti = [](double u) { return -1.0 / (2.0 * u * u) + 1.0 / (3.0 * u * u * u); };
  const double exact = 2.0 * 3.14159265358979323846 * (anti(8.0) - anti(1.0));
  CHECK(field.value_at_radius(0.0) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(field.value_at_radius(0.0) == doctest::Approx(1.0022).epsilon(1e-3));
}

TEST_CASE("field tables are nonincreasing for centred sources") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const InterferenceField field =
      InterferenceField::build(line_geom(), model, FieldSource::Mu, 1e-7);
  const Eigen::ArrayXd& values = field.base_table().values();
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i) {
    CHECK(values[i] >= values[i + 1] - 1e-12);
  }
}

TEST_CASE("interpolation stays within tolerance at random off-grid radii") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const NetworkGeometry geom = line_geom();
  const double tol = 1e-6;
  const InterferenceField field =
      InterferenceField::build(geom, model, FieldSource::Mu, tol);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double rho = rng.uniform(0.0, geom.radius);
    const double direct = InterferenceField::direct_value(
        geom, model, FieldSource::Mu, Vec2(rho, 0.0), 1e-11);
    CHECK(std::abs(field.value_at_radius(rho) - direct) <= tol);
  }
}

TEST_CASE("g recovers the field value after multiplying the path loss back") {
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const InterferenceField field =
      InterferenceField::build(line_geom(), model, FieldSource::Mu, 1e-7);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec2 x(rng.uniform(-5.0, 5.0), 0.0);
    const Vec2 y(rng.uniform(-5.0, 5.0), 0.0);
    const double g = g_eval(field, model, x, y);
    CHECK(g * model((x - y).norm()) ==
          doctest::Approx(field.value_at(y)).epsilon(1e-14));
    CHECK(g > 0.0);
  }
  // Reference point values: g(o, o) and the x=5, y=4 pair on the segment.
  CHECK(g_eval(field, model, origin(), origin()) ==
        doctest::Approx(2.6613).epsilon(4e-4));
  CHECK(g_eval(field, model, Vec2(5.0, 0.0), Vec2(4.0, 0.0)) ==
        doctest::Approx(2.3328).epsilon(4e-4));
}

TEST_CASE("combined-measure field is the base plus the weighted dense part") {
  NetworkGeometry geom = line_geom();
  geom.subarea = DenseSubarea{Vec2(1.5, 0.0), 0.8, 25.0};
  geom.validate();
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const InterferenceField base =
      InterferenceField::build(geom, model, FieldSource::Mu, 1e-7);
  const InterferenceField dense =
      InterferenceField::build(geom, model, FieldSource::LebDelta, 1e-7);
  const InterferenceField combined =
      InterferenceField::build(geom, model, FieldSource::MuA, 1e-7);
  Rng rng(5);
  for (int i = 0; i < 32; ++i) {
    const Vec2 y(rng.uniform(-5.0, 5.0), 0.0);
    CHECK(combined.value_at(y) ==
          doctest::Approx(base.value_at(y) + 25.0 * dense.value_at(y))
              .epsilon(1e-10));
  }
}

TEST_CASE("off-centre dense field matches direct quadrature") {
  NetworkGeometry geom = disk_geom();
  geom.subarea = DenseSubarea{Vec2(2.0, 1.0), 1.5, 10.0};
  geom.validate();
  const PathLossModel model = PathLossModel::shifted_power(1.0, 4.0);
  const InterferenceField dense =
      InterferenceField::build(geom, model, FieldSource::LebDelta, 1e-6);
  Rng rng(9);
  for (int i = 0; i < 8; ++i) {
    const double rho = rng.uniform(0.0, geom.radius);
    const double theta = rng.uniform(0.0, 6.28318);
    const Vec2 y(rho * std::cos(theta), rho * std::sin(theta));
    const double direct = InterferenceField::direct_value(
        geom, model, FieldSource::LebDelta, y, 1e-9);
    CHECK(dense.value_at(y) == doctest::Approx(direct).epsilon(1e-5));
  }
}
