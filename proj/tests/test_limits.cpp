#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hoplab/limits.hpp"
#include "hoplab/quadrature.hpp"
#include "hoplab/rng.hpp"
#include "hoplab/users.hpp"

using namespace hoplab;

namespace {

/// Trapezoid-rule oracle for the d=1 reference geometry (W = [-5,5],
/// l = min{1, r^-4}); independent of the kernel's field tables and
/// quadrature. Interference is memoized on a fine grid.
struct LineOracle {
  static constexpr int kNodes = 4000;
  std::vector<double> table;
  double i0;

  LineOracle() {
    table.resize(kNodes + 1);
    for (int i = 0; i <= kNodes; ++i) {
      table[i] = direct(-5.0 + 10.0 * i / kNodes);
    }
    i0 = direct(0.0);
  }
  static double ell(double r) { return r <= 1.0 ? 1.0 : std::pow(r, -4.0); }
  static double direct(double x) {
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double y = -5.0 + 10.0 * i / n;
      sum += ((i == 0 || i == n) ? 0.5 : 1.0) * ell(std::abs(y - x));
    }
    return sum * 10.0 / n;
  }
  double interference(double x) const {
    double t = (x + 5.0) / 10.0 * kNodes;
    int i = static_cast<int>(t);
    if (i >= kNodes) i = kNodes - 1;
    const double f = t - i;
    return table[i] * (1.0 - f) + table[i + 1] * f;
  }
  double two_hop_penalty(double x0, double x1) const {
    return interference(x1) / ell(std::abs(x0 - x1)) +
           i0 / ell(std::abs(x1));
  }
  double a1(double x0, double gamma) const {
    return std::exp(-gamma * i0 / ell(std::abs(x0)));
  }
  double a2(double x0, double gamma) const {
    const int n = 8000;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x1 = -5.0 + 10.0 * i / n;
      sum += ((i == 0 || i == n) ? 0.5 : 1.0) *
             std::exp(-gamma * two_hop_penalty(x0, x1));
    }
    return sum * 10.0 / n / 10.0;
  }
};

const LineOracle& line_oracle() {
  static LineOracle oracle;
  return oracle;
}

LimitKernel line_kernel(double gamma = 1.0, int k_max = 2) {
  return LimitKernel(NetworkGeometry(1, 5.0, gamma, 0.0, k_max),
                     PathLossModel::ideal_hertz(4.0));
}

}  // namespace

TEST_CASE("one-hop weight is the exact exponential") {
  const LimitKernel kernel = line_kernel(0.7);
  const Vec2 x0(2.5, 0.0);
  const ValueWithError a1 = kernel.a_k(x0, 1);
  CHECK(a1.value ==
        doctest::Approx(std::exp(-0.7 * kernel.g(x0, origin())))
            .epsilon(1e-14));
  CHECK(a1.std_error == 0.0);
  CHECK(!a1.monte_carlo);
}

TEST_CASE("two-hop weight matches the independent trapezoid oracle") {
  const LimitKernel kernel = line_kernel();
  const LineOracle& oracle = line_oracle();
  for (double x0 : {0.0, 1.5, 3.0}) {
    const double ours = kernel.a_k(Vec2(x0, 0.0), 2).value;
    CHECK(ours == doctest::Approx(oracle.a2(x0, 1.0)).epsilon(1e-4));
  }
}

TEST_CASE("three-hop Monte Carlo agrees with a dense product-grid oracle") {
  const NetworkGeometry geom(1, 2.0, 0.3, 0.0, 3);
  const PathLossModel model = PathLossModel::ideal_hertz(4.0);
  const LimitKernel kernel(geom, model, 40000, 5);
  const Vec2 x0(1.2, 0.0);
  const ValueWithError mc = kernel.a_k(x0, 3);
  CHECK(mc.monte_carlo);
  CHECK(mc.std_error > 0.0);
  // 2-d trapezoid over the two relays.
  const int n = 500;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vec2 x1(-2.0 + 4.0 * i / n, 0.0);
      const Vec2 x2(-2.0 + 4.0 * j / n, 0.0);
      const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
      const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
      const std::vector<Vec2> relays{x1, x2};
      sum += wi * wj * std::exp(-geom.gamma *
                                kernel.path_penalty(x0, relays));
    }
  }
  const double oracle = sum * (4.0 / n) * (4.0 / n) / (4.0 * 4.0);
  CHECK(std::abs(mc.value - oracle) < 4.0 * mc.std_error + 1e-6);
}

TEST_CASE("Monte Carlo sharding is reproducible") {
  const NetworkGeometry geom(1, 2.0, 0.5, 0.0, 3);
  const LimitKernel kernel(geom, PathLossModel::ideal_hertz(4.0));
  const std::vector<std::uint64_t> seeds{11, 22, 33};
  const Vec2 x0(1.0, 0.0);
  const ValueWithError a = kernel.a_k_monte_carlo(x0, 3, seeds, 2000);
  const ValueWithError b = kernel.a_k_monte_carlo(x0, 3, seeds, 2000);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("normalizer inverts the weight sum") {
  const LimitKernel kernel = line_kernel();
  const LineOracle& oracle = line_oracle();
  const Vec2 x0(0.0, 0.0);
  const ValueWithError a = kernel.normalizer_A(x0);
  const double sum = kernel.a_k(x0, 1).value + kernel.a_k(x0, 2).value;
  CHECK(a.value * sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.value ==
        doctest::Approx(1.0 / (oracle.a1(0.0, 1.0) + oracle.a2(0.0, 1.0)))
            .epsilon(1e-4));

  const LimitKernel direct_only = line_kernel(1.0, 1);
  const Vec2 y(1.7, 0.0);
  CHECK(direct_only.normalizer_A(y).value ==
        doctest::Approx(std::exp(direct_only.geometry().gamma *
                                 direct_only.g(y, origin())))
            .epsilon(1e-12));
}

TEST_CASE("typical trajectory law normalizes and favours two hops far out") {
  const LimitKernel kernel = line_kernel();
  SUBCASE("forced single hop") {
    const LimitKernel single = line_kernel(1.0, 1);
    const TypicalTrajectoryDensity t = single.typical_density(Vec2(2.0, 0.0));
    CHECK(t.hop_marginal[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("marginals sum to one") {
    for (double x : {0.3, 2.2, 4.8}) {
      const TypicalTrajectoryDensity t = kernel.typical_density(Vec2(x, 0.0));
      double sum = 0.0;
      for (double p : t.hop_marginal) sum += p;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  SUBCASE("far transmitter prefers the two-hop channel") {
    const TypicalTrajectoryDensity t = kernel.typical_density(Vec2(5.0, 0.0));
    CHECK(t.hop_marginal[1] > t.hop_marginal[0]);
    const LineOracle& oracle = line_oracle();
    CHECK(oracle.a2(5.0, 1.0) > oracle.a1(5.0, 1.0));
  }
  SUBCASE("density values follow the normalizer and penalty") {
    const Vec2 x0(1.0, 0.0);
    const TypicalTrajectoryDensity t = kernel.typical_density(x0);
    const std::vector<Vec2> relay{Vec2(0.5, 0.0)};
    const double expected =
        t.normalizer.value / kernel.mu_total() *
        std::exp(-kernel.geometry().gamma *
                 kernel.path_penalty(x0, relay));
    CHECK(kernel.density_value(t, 2, relay) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("one-hop density profile") {
  SUBCASE("gamma zero gives the uniform hop-count choice") {
    const LimitKernel kernel = line_kernel(0.0, 2);
    const std::vector<double> radii{0.0, 1.0, 3.0, 5.0};
    for (const auto& [rho, density] : kernel.nu1_density_profile(radii)) {
      CHECK(density == doctest::Approx(0.5).epsilon(1e-9));
    }
  }
  SUBCASE("reference geometry concentrates mass near the base station") {
    const LimitKernel kernel = line_kernel();
    const std::vector<double> radii{0.0};
    const double density = kernel.nu1_density_profile(radii)[0].second;
    // Frozen from the trapezoid oracle: a1/(a1+a2) at the origin.
    const LineOracle& oracle = line_oracle();
    const double expected =
        oracle.a1(0.0, 1.0) / (oracle.a1(0.0, 1.0) + oracle.a2(0.0, 1.0));
    CHECK(density == doctest::Approx(expected).epsilon(1e-4));
    CHECK(density > 0.98);
  }
  SUBCASE("densities are probabilities and the channels sum to one") {
    const LimitKernel kernel = line_kernel();
    for (double rho : {0.4, 1.1, 2.7, 4.9}) {
      const Vec2 x0(rho, 0.0);
      const TypicalTrajectoryDensity t = kernel.typical_density(x0);
      const double nu1 = t.hop_marginal[0];
      CHECK(nu1 >= 0.0);
      CHECK(nu1 <= 1.0);
      CHECK(t.hop_marginal[0] + t.hop_marginal[1] ==
            doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("optimal relay geometry") {
  SUBCASE("near transmitters relay outwards (weak decrease)") {
    const LimitKernel kernel = line_kernel();
    for (double x : {0.2, 0.5, 0.9}) {
      const OptimalRelay relay = kernel.optimal_relay(Vec2(x, 0.0));
      CHECK(relay.relay.norm() > x);
    }
  }
  SUBCASE("1-d brute scan confirms the minimum") {
    const LimitKernel kernel = line_kernel();
    const Vec2 x0(3.7, 0.0);
    const OptimalRelay relay = kernel.optimal_relay(x0);
    double brute = 1e300;
    for (int i = 0; i <= 100000; ++i) {
      const Vec2 x1(-5.0 + 10.0 * i / 100000.0, 0.0);
      brute = std::min(brute, kernel.g(x0, x1) + kernel.g(x1, origin()));
    }
    CHECK(relay.value <= brute + 1e-9);
  }
  SUBCASE("2-d strictly decreasing: segment search beats a 400x400 grid") {
    const NetworkGeometry geom(2, 7.0, 1.0, 0.0, 2);
    const LimitKernel kernel(geom, PathLossModel::shifted_power(1.0, 4.0));
    Rng rng(31);
    for (int trial = 0; trial < 3; ++trial) {
      const double rho = rng.uniform(0.5, 7.0);
      const double theta = rng.uniform(0.0, 6.283);
      const Vec2 x0(rho * std::cos(theta), rho * std::sin(theta));
      const OptimalRelay relay = kernel.optimal_relay(x0);
      double brute = 1e300;
      Vec2 brute_arg;
      for (int i = 0; i < 400; ++i) {
        for (int j = 0; j < 400; ++j) {
          const Vec2 x1(-7.0 + 14.0 * (i + 0.5) / 400.0,
                        -7.0 + 14.0 * (j + 0.5) / 400.0);
          if (x1.norm() > 7.0) continue;
          const double v = kernel.g(x0, x1) + kernel.g(x1, origin());
          if (v < brute) {
            brute = v;
            brute_arg = x1;
          }
        }
      }
      CHECK(relay.value <= brute + 1e-9);
      CHECK((relay.relay - brute_arg).norm() < 14.0 / 400.0 * 2.0);
      const Vec2 unit = x0 / x0.norm();
      const double cross =
          std::abs(unit.x() * relay.relay.y() - unit.y() * relay.relay.x());
      CHECK(cross < 1e-9);
      const double along = unit.dot(relay.relay);
      CHECK(along >= -1e-12);
      CHECK(along <= x0.norm() + 1e-12);
    }
  }
  SUBCASE("relay fractions in the 2-d reference geometry stay near 1/2") {
    const NetworkGeometry geom(2, 7.0, 1.0, 0.0, 2);
    const LimitKernel kernel(geom, PathLossModel::shifted_power(1.0, 4.0));
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec2 x0 = sample_in_ball(2, 7.0, rng);
      if (x0.norm() < 1e-6) continue;
      const OptimalRelay relay = kernel.optimal_relay(x0);
      const double fraction = relay.relay.norm() / x0.norm();
      CHECK(fraction > 0.49);
      CHECK(fraction < 0.51);
    }
  }
}

TEST_CASE("transition radius") {
  const LimitKernel kernel = line_kernel();
  const std::optional<double> r0 = kernel.transition_radius_r0star(1e-6);
  REQUIRE(r0.has_value());
  SUBCASE("dense scan oracle brackets the same root") {
    auto margin = [&](double rho) {
      const Vec2 x0(rho, 0.0);
      double best = 1e300;
      for (int i = 0; i <= 10000; ++i) {
        const Vec2 x1(-5.0 + 10.0 * i / 10000.0, 0.0);
        best = std::min(best, kernel.g(x0, x1) + kernel.g(x1, origin()));
      }
      return kernel.g(x0, origin()) - best;
    };
    double lo = 0.0, hi = 5.0;
    for (int i = 1; i <= 200; ++i) {
      const double rho = 5.0 * i / 200.0;
      if (margin(rho) > 0.0) {
        hi = rho;
        lo = rho - 5.0 / 200.0;
        break;
      }
    }
    CHECK(*r0 >= lo - 1e-6);
    CHECK(*r0 <= hi + 1e-6);
    CHECK(*r0 == doctest::Approx(1.189128).epsilon(1e-3));
  }
  SUBCASE("independent of gamma") {
    for (double gamma : {0.1, 10.0}) {
      const LimitKernel other = line_kernel(gamma);
      const std::optional<double> r = other.transition_radius_r0star(1e-6);
      REQUIRE(r.has_value());
      CHECK(*r == doctest::Approx(*r0).epsilon(1e-7));
    }
  }
  SUBCASE("no crossing reported when the area is too small") {
    const LimitKernel tiny(NetworkGeometry(1, 0.8, 1.0, 0.0, 2),
                           PathLossModel::ideal_hertz(4.0));
    CHECK(!tiny.transition_radius_r0star().has_value());
  }
}

TEST_CASE("incoming hop measure") {
  SUBCASE("no relays when everyone transmits directly") {
    const LimitKernel kernel = line_kernel(1.0, 1);
    const std::vector<Vec2> grid{Vec2(0.0, 0.0), Vec2(2.0, 0.0)};
    const IncomingHopResult res = kernel.incoming_hop_measure(grid);
    CHECK(res.total_mass.value == 0.0);
    for (const ValueWithError& d : res.density) CHECK(d.value == 0.0);
  }
  SUBCASE("density integration reproduces the marginal-identity mass") {
    const LimitKernel kernel = line_kernel();
    std::vector<Vec2> grid;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      grid.emplace_back(-5.0 + 10.0 * i / n, 0.0);
    }
    const IncomingHopResult res = kernel.incoming_hop_measure(grid);
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      integral += ((i == 0 || i == n) ? 0.5 : 1.0) * res.density[i].value;
    }
    integral *= 10.0 / n;
    CHECK(res.total_mass.value > 0.0);
    CHECK(integral == doctest::Approx(res.total_mass.value).epsilon(1e-3));
  }
}

TEST_CASE("variational objective") {
  const LimitKernel kernel = line_kernel();
  SUBCASE("direct-only family has zero entropy") {
    const LimitKernel single = line_kernel(1.0, 1);
    DiscretizedTrajectoryFamily family;
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      family.centers.emplace_back(-5.0 + (i + 0.5) * 10.0 / n, 0.0);
      family.cell_mu.push_back(10.0 / n);
    }
    family.densities.push_back(std::vector<double>(n, 1.0));
    const double objective = single.variational_objective(family);
    double expected = 0.0;
    for (int i = 0; i < n; ++i) {
      expected += family.cell_mu[i] * single.g(family.centers[i], origin());
    }
    CHECK(objective == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("inadmissible families are rejected with the deviation") {
    DiscretizedTrajectoryFamily family;
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      family.centers.emplace_back(-5.0 + (i + 0.5) * 10.0 / n, 0.0);
      family.cell_mu.push_back(10.0 / n);
    }
    family.densities.push_back(std::vector<double>(n, 0.5));
    family.densities.push_back(
        std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
    try {
      kernel.variational_objective(family);
      FAIL("expected admissibility error");
    } catch (const AdmissibilityError& e) {
      CHECK(e.max_deviation == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("the limiting minimizer beats random admissible perturbations") {
    const DiscretizedTrajectoryFamily base = kernel.minimizer_family(48);
    const double best = kernel.variational_objective(base);
    Rng rng(2024);
    const int n = base.cells();
    for (int trial = 0; trial < 20; ++trial) {
      DiscretizedTrajectoryFamily family = base;
      for (int moves = 0; moves < 6; ++moves) {
        const int i = static_cast<int>(rng.uniform_index(n));
        const int j = static_cast<int>(rng.uniform_index(n));
        // Shift mass between the direct channel and relay cell j, keeping
        // the per-transmitter balance exact.
        const double delta = rng.uniform(0.05, 0.4) * family.densities[0][i];
        family.densities[0][i] -= delta;
        family.densities[1][static_cast<std::size_t>(i) * n + j] +=
            delta / family.cell_mu[j];
      }
      const double perturbed = kernel.variational_objective(family);
      CHECK(perturbed > best);
    }
  }
  SUBCASE("objective is invariant under cell relabeling") {
    const DiscretizedTrajectoryFamily base = kernel.minimizer_family(24);
    const double objective = kernel.variational_objective(base);
    const int n = base.cells();
    DiscretizedTrajectoryFamily shuffled;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i * 7 + 3) % n;
    shuffled.centers.resize(n);
    shuffled.cell_mu.resize(n);
    shuffled.densities = {std::vector<double>(n),
                          std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int i = 0; i < n; ++i) {
      shuffled.centers[perm[i]] = base.centers[i];
      shuffled.cell_mu[perm[i]] = base.cell_mu[i];
      shuffled.densities[0][perm[i]] = base.densities[0][i];
      for (int j = 0; j < n; ++j) {
        shuffled.densities[1][static_cast<std::size_t>(perm[i]) * n + perm[j]] =
            base.densities[1][static_cast<std::size_t>(i) * n + j];
      }
    }
    CHECK(kernel.variational_objective(shuffled) ==
          doctest::Approx(objective).epsilon(1e-10));
  }
}

TEST_CASE("two-hop mass grows with the interference weight beyond r0*") {
  // Probed as stated on a gamma ladder, not claimed as a theorem.
  const std::vector<double> gammas{0.25, 0.5, 1.0};
  const Vec2 x0(2.0, 0.0);  // beyond r0* ~ 1.19
  double previous = -1.0;
  for (double gamma : gammas) {
    const LimitKernel kernel = line_kernel(gamma);
    const TypicalTrajectoryDensity t = kernel.typical_density(x0);
    CHECK(t.hop_marginal[1] >= previous - 1e-9);
    previous = t.hop_marginal[1];
  }
}

TEST_CASE("radial profile cache matches pointwise evaluation") {
  const LimitKernel kernel = line_kernel();
  const LimitKernel::RadialProfiles& prof = kernel.radial_profiles(257);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const double rho = rng.uniform(0.0, 5.0);
    const ValueWithError a = kernel.normalizer_A(Vec2(rho, 0.0));
    CHECK(prof.normalizer(rho) == doctest::Approx(a.value).epsilon(1e-5));
  }
}
