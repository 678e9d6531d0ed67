#include <doctest.h>

#include "hoplab/config.hpp"

using namespace hoplab;

namespace {

const char* kSample = R"(# limit profile study
experiment = limit-profiles
dimension = 1
radius = 5
alpha = 4
pathloss_kind = ideal_hertz
gamma = 1
kmax = 2
gammas = 0, 0.001, 0.01, 0.1, 0.4, 0.7, 1, inf
seed = 11
)";

}  // namespace

TEST_CASE("config parse, serialize, parse round-trips") {
  const ExperimentConfig a = ExperimentConfig::parse(kSample);
  const std::string canon = a.serialize();
  const ExperimentConfig b = ExperimentConfig::parse(canon);
  CHECK(b.serialize() == canon);
  CHECK(a.experiment() == "limit-profiles");
  CHECK(a.number("gamma") == 1.0);
  CHECK(a.integer("kmax") == 2);
  const std::vector<double> ladder = a.number_list("gammas");
  REQUIRE(ladder.size() == 8);
  CHECK(ladder[1] == doctest::Approx(0.001));
  CHECK(std::isinf(ladder.back()));
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::parse("bogus_key = 3\n"), ConfigError);
  try {
    ExperimentConfig::parse("bogus_key = 3\n");
  } catch (const ConfigError& e) {
    CHECK(e.key == "bogus_key");
  }
}

TEST_CASE("missing required keys are reported by name") {
  ExperimentConfig config = ExperimentConfig::parse(
      "experiment = mcmc\ndimension = 1\nradius = 5\nalpha = 4\n"
      "pathloss_kind = ideal_hertz\nbeta = 0.3\nkmax = 2\nlambda = 1\n"
      "steps = 100\n");
  try {
    config.experiment();
    FAIL("expected a validation error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "gamma");
  }
}

TEST_CASE("geometry and path loss blocks construct domain objects") {
  ExperimentConfig config = ExperimentConfig::parse(
      "dimension = 2\nradius = 7\nalpha = 4\npathloss_kind = shifted_power\n"
      "pathloss_shift = 1\ngamma = 0.5\nbeta = 0.25\nkmax = 3\n"
      "delta_center = 1.0, 0.5\ndelta_radius = 2\na = 100\n");
  const NetworkGeometry geom = config.geometry();
  CHECK(geom.dimension == 2);
  CHECK(geom.radius == 7.0);
  CHECK(geom.k_max == 3);
  REQUIRE(geom.subarea.has_value());
  CHECK(geom.subarea->center.x() == doctest::Approx(1.0));
  CHECK(geom.subarea->center.y() == doctest::Approx(0.5));
  CHECK(geom.subarea->weight == doctest::Approx(100.0));
  const PathLossModel model = config.pathloss();
  CHECK(model.kind == PathLossKind::ShiftedPower);
  CHECK(model(0.0) == doctest::Approx(1.0));
}

TEST_CASE("malformed lines and bad experiments raise errors") {
  CHECK_THROWS_AS(ExperimentConfig::parse("radius 5\n"), ConfigError);
  ExperimentConfig config = ExperimentConfig::parse("experiment = dance\n");
  CHECK_THROWS_AS(config.experiment(), ConfigError);
}
