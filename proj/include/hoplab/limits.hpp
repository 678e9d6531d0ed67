#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/interference.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

/// Scalar result that may carry Monte Carlo uncertainty. `flagged` is set
/// when the relative standard error exceeds the kernel's requested bound.
struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
  bool monte_carlo = false;
  bool flagged = false;
};

/// Hop-count marginal and relay densities of the typical trajectory from a
/// fixed transmitter in the high-density limit.
struct TypicalTrajectoryDensity {
  Vec2 x0;
  ValueWithError normalizer;          // A(x0)
  std::vector<ValueWithError> a;      // a_1 .. a_{k_max}
  std::vector<double> hop_marginal;   // pi_0 T(k) = A(x0) a_k(x0)

  int k_max() const { return static_cast<int>(a.size()); }
};

/// Candidate trajectory family on a grid: per-k densities with respect to
/// mu^(tensor k), transmitter coordinate first.
struct DiscretizedTrajectoryFamily {
  std::vector<Vec2> centers;
  std::vector<double> cell_mu;
  std::vector<std::vector<double>> densities;

  int k_max() const { return static_cast<int>(densities.size()); }
  int cells() const { return static_cast<int>(centers.size()); }
};

struct AdmissibilityError : std::runtime_error {
  double max_deviation;
  explicit AdmissibilityError(double dev)
      : std::runtime_error("family violates the per-transmitter mass balance"),
        max_deviation(dev) {}
};

struct OptimalRelay {
  Vec2 relay;
  double value;       // attained min of g(x0,.) + g(.,o)
  bool multiple;      // another minimum within tolerance elsewhere
};

struct IncomingHopResult {
  std::vector<Vec2> grid;
  std::vector<ValueWithError> density;   // dM/dLeb at grid points
  ValueWithError total_mass;             // M(W) via the marginal identity
};

/// Evaluator for the limiting objects: the per-hop penalty g, the k-hop
/// weights a_k, their normalizer A, the typical-trajectory law, optimal
/// relays, and the one-vs-two-hop transition radius.
class LimitKernel {
 public:
  LimitKernel(NetworkGeometry geom, PathLossModel model, int mc_budget = 20000,
              std::uint64_t seed = 1, double field_tol = 1e-6,
              double mc_rel_error_bound = 0.05);

  const NetworkGeometry& geometry() const { return geom_; }
  const PathLossModel& model() const { return model_; }
  const InterferenceField& field() const { return field_; }
  double mu_total() const { return mu_total_; }
  int mc_budget() const { return mc_budget_; }
  std::uint64_t seed() const { return seed_; }

  double g(const Vec2& x, const Vec2& y) const {
    return field_.value_at(y) / model_((x - y).norm());
  }

  /// Sum of g over the hops of (x0, relays..., o).
  double path_penalty(const Vec2& x0, std::span<const Vec2> relays) const;

  /// a_k(x0): k=1 exact, k=2 deterministic quadrature, k>=3 Monte Carlo with
  /// relays i.i.d. mu/mu(W). Seeds derive from the kernel seed, k and x0.
  ValueWithError a_k(const Vec2& x0, int k) const;
  /// Monte Carlo variant with explicit shard seeds; the pooled result is
  /// identical no matter how shards are scheduled across threads.
  ValueWithError a_k_monte_carlo(const Vec2& x0, int k,
                                 std::span<const std::uint64_t> shard_seeds,
                                 int samples_per_shard) const;

  ValueWithError normalizer_A(const Vec2& x0) const;
  TypicalTrajectoryDensity typical_density(const Vec2& x0) const;
  /// T(k, x1..x_{k-1}) for a given typical-density result.
  double density_value(const TypicalTrajectoryDensity& t, int k,
                       std::span<const Vec2> relays) const;
  double log_density_value(const TypicalTrajectoryDensity& t, int k,
                           std::span<const Vec2> relays) const;

  /// d nu_1 / d mu at |x0| = radius (density of one-hop transmitters).
  std::vector<std::pair<double, double>> nu1_density_profile(
      std::span<const double> radii) const;

  /// min over x1 in W of g(x0,x1)+g(x1,o) and its minimizer.
  OptimalRelay optimal_relay(const Vec2& x0) const;

  /// Radius where the direct penalty g(x0,o) and the best two-hop penalty
  /// cross; independent of gamma. nullopt when no sign change exists in W.
  std::optional<double> transition_radius_r0star(double xtol = 1e-4) const;

  IncomingHopResult incoming_hop_measure(std::span<const Vec2> grid) const;

  /// J(Sigma) + gamma S(Sigma) for a candidate family; throws
  /// AdmissibilityError when the mass-balance constraint fails.
  double variational_objective(const DiscretizedTrajectoryFamily& family,
                               double admissibility_tol = 1e-6) const;

  /// Discretization of the limiting minimizer on an axis grid with n cells
  /// per dimension (d=1 only), renormalized cell-wise so the mass balance
  /// holds exactly on the grid. k_max must be <= 2.
  DiscretizedTrajectoryFamily minimizer_family(int n) const;

  /// A(.) and a_k(.) as radial interpolants (built lazily, cached).
  struct RadialProfiles {
    RadialTable normalizer;
    std::vector<RadialTable> a;
  };
  const RadialProfiles& radial_profiles(int nodes = 129) const;

 private:
  ValueWithError a2_quadrature(const Vec2& x0) const;
  double two_hop_min_value(const Vec2& x0) const;

  NetworkGeometry geom_;
  PathLossModel model_;
  InterferenceField field_;
  double mu_total_;
  int mc_budget_;
  std::uint64_t seed_;
  double mc_rel_error_bound_;
  mutable std::optional<RadialProfiles> profiles_;
  mutable int profile_nodes_ = 0;
};

}  // namespace hoplab
