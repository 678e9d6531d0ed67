#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/pathloss.hpp"
#include "hoplab/rng.hpp"
#include "hoplab/users.hpp"

namespace hoplab {

/// One message trajectory: transmitter index plus relay index sequence
/// (repeats allowed); the terminal receiver at the origin is implicit.
struct Trajectory {
  int transmitter = 0;
  std::vector<int> relays;

  int hops() const { return static_cast<int>(relays.size()) + 1; }
  bool operator==(const Trajectory& other) const = default;
};

/// One trajectory per user plus cached incoming-hop counts and energies.
class TrajectoryConfiguration {
 public:
  TrajectoryConfiguration() = default;
  /// All users transmit directly to the origin.
  static TrajectoryConfiguration all_direct(const UserConfiguration& users,
                                            const Eigen::MatrixXd& sir_inv);

  const std::vector<Trajectory>& trajectories() const { return paths_; }
  const std::vector<int>& incoming_counts() const { return incoming_; }
  double interference_energy() const { return s_energy_; }   // S
  double congestion_energy() const { return m_energy_; }     // M

  /// Replace user u's trajectory, updating caches incrementally. Returns the
  /// (delta S, delta M) of the move.
  std::pair<double, double> replace(int user, Trajectory next,
                                    const Eigen::MatrixXd& sir_inv);

  /// Rebuilds every cache from scratch (the coherence oracle).
  void recompute(const Eigen::MatrixXd& sir_inv);

  /// Own-trajectory interference energy of one trajectory.
  static double trajectory_energy(const Trajectory& t,
                                  const Eigen::MatrixXd& sir_inv);

  void set_all(std::vector<Trajectory> paths, const Eigen::MatrixXd& sir_inv);

  bool operator==(const TrajectoryConfiguration& other) const {
    return paths_ == other.paths_;
  }

 private:
  std::vector<Trajectory> paths_;
  std::vector<int> incoming_;
  double s_energy_ = 0.0;
  double m_energy_ = 0.0;
};

/// (S, M) of a configuration, recomputed from scratch.
std::pair<double, double> energy(const TrajectoryConfiguration& config,
                                 const UserConfiguration& users,
                                 const PathLossModel& model);

/// Exact Gibbs law on all trajectory configurations of a small instance.
struct ExactDistribution {
  std::vector<std::vector<Trajectory>> per_user;  // strategy lists
  std::vector<double> probability;                // flat odometer order
  std::vector<std::vector<double>> user_marginal;
  double log_partition = 0.0;

  std::int64_t states() const {
    return static_cast<std::int64_t>(probability.size());
  }
  /// Flat index of a configuration in the odometer order.
  std::int64_t index_of(const TrajectoryConfiguration& config) const;
};

struct EnumerationBudgetError : std::runtime_error {
  std::int64_t state_count;
  explicit EnumerationBudgetError(std::int64_t n)
      : std::runtime_error("enumerate_exact: state space too large"),
        state_count(n) {}
};

ExactDistribution enumerate_exact(const UserConfiguration& users,
                                  const NetworkGeometry& geom,
                                  const PathLossModel& model,
                                  std::int64_t max_states = 10'000'000);

enum class ChainKernel { Metropolis, Gibbs };

struct ChainState {
  TrajectoryConfiguration config;
  std::int64_t step = 0;
  Rng rng{1};
  double gamma_t = 0.0;
  double beta_t = 0.0;
  bool last_accepted = false;
};

ChainState make_chain_state(const UserConfiguration& users,
                            const NetworkGeometry& geom,
                            const Eigen::MatrixXd& sir_inv,
                            std::uint64_t seed);

/// One Markov step. Metropolis proposes a fresh trajectory for a uniform
/// user from the a priori law and accepts with min(1, exp(-delta E)); the
/// Gibbs kernel resamples that user's trajectory from its exact conditional.
void mcmc_step(ChainState& state, ChainKernel kernel,
               const UserConfiguration& users, const NetworkGeometry& geom,
               const Eigen::MatrixXd& sir_inv);

struct ChainTrace {
  std::vector<std::int64_t> steps;
  std::vector<double> s_energy;
  std::vector<double> m_energy;
  std::vector<bool> accepted;
  std::vector<std::int64_t> hop_histogram;   // index: hop count
  std::vector<std::int64_t> incoming_histogram;  // index: m_i value
  std::vector<TrajectoryConfiguration> snapshots;
};

ChainTrace run_chain(ChainState& state, ChainKernel kernel,
                     const UserConfiguration& users,
                     const NetworkGeometry& geom,
                     const Eigen::MatrixXd& sir_inv, std::int64_t steps,
                     std::int64_t thin, bool keep_snapshots = false);

struct AnnealResult {
  TrajectoryConfiguration best;
  double best_energy;   // gamma S + beta M at target weights
  std::int64_t best_step;
};

/// Metropolis with weights ramped as (gamma_t, beta_t) =
/// (gamma, beta) min(1, c0 log(t+1)/gamma); tracks the best configuration
/// visited under the target energy.
AnnealResult anneal(const UserConfiguration& users,
                    const NetworkGeometry& geom, const PathLossModel& model,
                    double c0, std::int64_t t_max, std::uint64_t seed);

/// Default schedule constant: lambda / N^2.
double default_anneal_c0(const UserConfiguration& users);

void write_trace_csv(const ChainTrace& trace, const std::string& path);
std::string configuration_json(const TrajectoryConfiguration& config);

}  // namespace hoplab
