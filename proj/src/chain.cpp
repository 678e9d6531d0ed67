#include "hoplab/chain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hoplab {

namespace {

/// Per-user trajectory count sum_k N^{k-1}; -1 on overflow past limit.
std::int64_t trajectories_per_user(int n, int k_max, std::int64_t limit) {
  std::int64_t total = 0, block = 1;
  for (int k = 1; k <= k_max; ++k) {
    total += block;
    if (total > limit) return -1;
    if (k < k_max) {
      if (block > limit / std::max(1, n)) return -1;
      block *= n;
    }
  }
  return total;
}

/// Enumerates the t-th trajectory of a user in odometer order: index 0 is
/// direct, then the N one-relay paths, then the N^2 two-relay paths, ...
Trajectory nth_trajectory(int user, int n, std::int64_t t) {
  Trajectory traj;
  traj.transmitter = user;
  std::int64_t block = 1;
  int k = 1;
  while (t >= block) {
    t -= block;
    block *= n;
    ++k;
  }
  traj.relays.resize(k - 1);
  for (int l = k - 2; l >= 0; --l) {
    traj.relays[l] = static_cast<int>(t % n);
    t /= n;
  }
  return traj;
}

std::int64_t trajectory_rank(const Trajectory& t, int n) {
  std::int64_t base = 0, block = 1;
  for (int k = 1; k < t.hops(); ++k) {
    base += block;
    block *= n;
  }
  std::int64_t offset = 0;
  for (int relay : t.relays) offset = offset * n + relay;
  return base + offset;
}

double congestion_from_counts(const std::vector<int>& m) {
  double total = 0.0;
  for (int v : m) total += static_cast<double>(v) * (v - 1);
  return total;
}

}  // namespace

double TrajectoryConfiguration::trajectory_energy(
    const Trajectory& t, const Eigen::MatrixXd& sir_inv) {
  const int receiver_origin = static_cast<int>(sir_inv.cols()) - 1;
  double total = 0.0;
  int prev = t.transmitter;
  for (int relay : t.relays) {
    total += sir_inv(prev, relay);
    prev = relay;
  }
  total += sir_inv(prev, receiver_origin);
  return total;
}

TrajectoryConfiguration TrajectoryConfiguration::all_direct(
    const UserConfiguration& users, const Eigen::MatrixXd& sir_inv) {
  TrajectoryConfiguration config;
  std::vector<Trajectory> paths(users.count());
  for (int i = 0; i < users.count(); ++i) paths[i].transmitter = i;
  config.set_all(std::move(paths), sir_inv);
  return config;
}

void TrajectoryConfiguration::set_all(std::vector<Trajectory> paths,
                                      const Eigen::MatrixXd& sir_inv) {
  paths_ = std::move(paths);
  recompute(sir_inv);
}

void TrajectoryConfiguration::recompute(const Eigen::MatrixXd& sir_inv) {
  incoming_.assign(paths_.size(), 0);
  s_energy_ = 0.0;
  for (const Trajectory& t : paths_) {
    s_energy_ += trajectory_energy(t, sir_inv);
    for (int relay : t.relays) incoming_[relay] += 1;
  }
  m_energy_ = congestion_from_counts(incoming_);
}

std::pair<double, double> TrajectoryConfiguration::replace(
    int user, Trajectory next, const Eigen::MatrixXd& sir_inv) {
  Trajectory& current = paths_[user];
  const double ds = trajectory_energy(next, sir_inv) -
                    trajectory_energy(current, sir_inv);
  double dm = 0.0;
  auto bump = [&](int relay, int delta) {
    const int before = incoming_[relay];
    const int after = before + delta;
    incoming_[relay] = after;
    dm += static_cast<double>(after) * (after - 1) -
          static_cast<double>(before) * (before - 1);
  };
  for (int relay : current.relays) bump(relay, -1);
  for (int relay : next.relays) bump(relay, +1);
  s_energy_ += ds;
  m_energy_ += dm;
  current = std::move(next);
  return {ds, dm};
}

std::pair<double, double> energy(const TrajectoryConfiguration& config,
                                 const UserConfiguration& users,
                                 const PathLossModel& model) {
  const Eigen::MatrixXd sir_inv = sir_inverse_table(users, model);
  double s = 0.0;
  std::vector<int> m(users.count(), 0);
  for (const Trajectory& t : config.trajectories()) {
    s += TrajectoryConfiguration::trajectory_energy(t, sir_inv);
    for (int relay : t.relays) m[relay] += 1;
  }
  return {s, congestion_from_counts(m)};
}

std::int64_t ExactDistribution::index_of(
    const TrajectoryConfiguration& config) const {
  const int n = static_cast<int>(per_user.size());
  std::int64_t idx = 0;
  for (int i = 0; i < n; ++i) {
    idx = idx * static_cast<std::int64_t>(per_user[i].size()) +
          trajectory_rank(config.trajectories()[i], n);
  }
  return idx;
}

ExactDistribution enumerate_exact(const UserConfiguration& users,
                                  const NetworkGeometry& geom,
                                  const PathLossModel& model,
                                  std::int64_t max_states) {
  const int n = users.count();
  if (n == 0) throw std::invalid_argument("enumerate_exact: no users");
  const std::int64_t per = trajectories_per_user(n, geom.k_max, max_states);
  std::int64_t total = 1;
  if (per > 0) {
    for (int i = 0; i < n; ++i) {
      if (total > max_states / per) {
        total = -1;
        break;
      }
      total *= per;
    }
  } else {
    total = -1;
  }
  if (total < 0 || total > max_states) {
    throw EnumerationBudgetError(total);
  }

  const Eigen::MatrixXd sir_inv = sir_inverse_table(users, model);
  ExactDistribution dist;
  dist.per_user.resize(n);
  std::vector<std::vector<double>> log_prior(n), own_energy(n);
  for (int i = 0; i < n; ++i) {
    dist.per_user[i].reserve(per);
    for (std::int64_t t = 0; t < per; ++t) {
      Trajectory traj = nth_trajectory(i, n, t);
      own_energy[i].push_back(
          TrajectoryConfiguration::trajectory_energy(traj, sir_inv));
      log_prior[i].push_back(-(traj.hops() - 1) * std::log(double(n)));
      dist.per_user[i].push_back(std::move(traj));
    }
  }

  // Odometer sweep over the product space with incremental congestion counts.
  std::vector<std::int64_t> digit(n, 0);
  std::vector<int> m(n, 0);
  double s_energy = 0.0, log_w = 0.0;
  for (int i = 0; i < n; ++i) {
    s_energy += own_energy[i][0];
    log_w += log_prior[i][0];
  }
  std::vector<double> log_weight(total);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::int64_t idx = 0;; ++idx) {
    const double lw =
        log_w - geom.gamma * s_energy - geom.beta * congestion_from_counts(m);
    log_weight[idx] = lw;
    max_log = std::max(max_log, lw);
    if (idx + 1 >= total) break;
    // Advance the odometer (last user fastest, matching index_of).
    for (int i = n - 1; i >= 0; --i) {
      const Trajectory& old_t = dist.per_user[i][digit[i]];
      for (int relay : old_t.relays) m[relay] -= 1;
      s_energy -= own_energy[i][digit[i]];
      log_w -= log_prior[i][digit[i]];
      digit[i] = (digit[i] + 1) % per;
      const Trajectory& new_t = dist.per_user[i][digit[i]];
      for (int relay : new_t.relays) m[relay] += 1;
      s_energy += own_energy[i][digit[i]];
      log_w += log_prior[i][digit[i]];
      if (digit[i] != 0) break;
    }
  }

  double norm = 0.0;
  for (double lw : log_weight) norm += std::exp(lw - max_log);
  dist.log_partition = max_log + std::log(norm);
  dist.probability.resize(total);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    dist.probability[idx] = std::exp(log_weight[idx] - dist.log_partition);
  }

  dist.user_marginal.assign(n, std::vector<double>(per, 0.0));
  std::vector<std::int64_t> strides(n, 1);
  for (int i = n - 2; i >= 0; --i) strides[i] = strides[i + 1] * per;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < n; ++i) {
      dist.user_marginal[i][(idx / strides[i]) % per] +=
          dist.probability[idx];
    }
  }
  return dist;
}

ChainState make_chain_state(const UserConfiguration& users,
                            const NetworkGeometry& geom,
                            const Eigen::MatrixXd& sir_inv,
                            std::uint64_t seed) {
  ChainState state;
  state.config = TrajectoryConfiguration::all_direct(users, sir_inv);
  state.rng = Rng(seed);
  state.gamma_t = geom.gamma;
  state.beta_t = geom.beta;
  return state;
}

namespace {

Trajectory propose_prior(int user, int n, int k_max, Rng& rng) {
  Trajectory t;
  t.transmitter = user;
  const int k = 1 + static_cast<int>(rng.uniform_index(k_max));
  t.relays.resize(k - 1);
  for (int l = 0; l < k - 1; ++l) {
    t.relays[l] = static_cast<int>(rng.uniform_index(n));
  }
  return t;
}

}  // namespace

void mcmc_step(ChainState& state, ChainKernel kernel,
               const UserConfiguration& users, const NetworkGeometry& geom,
               const Eigen::MatrixXd& sir_inv) {
  const int n = users.count();
  const int user = static_cast<int>(state.rng.uniform_index(n));
  if (kernel == ChainKernel::Metropolis) {
    Trajectory proposal = propose_prior(user, n, geom.k_max, state.rng);
    const double accept_u = state.rng.uniform();
    Trajectory previous = state.config.trajectories()[user];
    const auto [ds, dm] = state.config.replace(user, std::move(proposal),
                                               sir_inv);
    const double delta_e = state.gamma_t * ds + state.beta_t * dm;
    if (delta_e <= 0.0 || accept_u < std::exp(-delta_e)) {
      state.last_accepted = true;
    } else {
      state.config.replace(user, std::move(previous), sir_inv);
      state.last_accepted = false;
    }
  } else {
    const std::int64_t per = trajectories_per_user(n, geom.k_max, 1'000'000);
    if (per < 0) {
      throw std::invalid_argument(
          "mcmc_step: Gibbs kernel unavailable, per-user state count over "
          "budget");
    }
    // Conditional of user's trajectory given all others.
    std::vector<int> others(state.config.incoming_counts());
    for (int relay : state.config.trajectories()[user].relays) {
      others[relay] -= 1;
    }
    std::vector<double> log_w(per);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::int64_t t = 0; t < per; ++t) {
      Trajectory traj = nth_trajectory(user, n, t);
      std::vector<int> add;
      double dm = 0.0;
      std::vector<int> counts(others);
      for (int relay : traj.relays) {
        dm += 2.0 * counts[relay];
        counts[relay] += 1;
      }
      const double lw =
          -(traj.hops() - 1) * std::log(double(n)) -
          state.gamma_t *
              TrajectoryConfiguration::trajectory_energy(traj, sir_inv) -
          state.beta_t * dm;
      log_w[t] = lw;
      max_log = std::max(max_log, lw);
    }
    double norm = 0.0;
    for (double lw : log_w) norm += std::exp(lw - max_log);
    const double u = state.rng.uniform() * norm;
    double acc = 0.0;
    std::int64_t chosen = per - 1;
    for (std::int64_t t = 0; t < per; ++t) {
      acc += std::exp(log_w[t] - max_log);
      if (u <= acc) {
        chosen = t;
        break;
      }
    }
    state.config.replace(user, nth_trajectory(user, n, chosen), sir_inv);
    state.last_accepted = true;
  }
  state.step += 1;
}

ChainTrace run_chain(ChainState& state, ChainKernel kernel,
                     const UserConfiguration& users,
                     const NetworkGeometry& geom,
                     const Eigen::MatrixXd& sir_inv, std::int64_t steps,
                     std::int64_t thin, bool keep_snapshots) {
  ChainTrace trace;
  const int k_max = geom.k_max;
  trace.hop_histogram.assign(k_max + 1, 0);
  for (std::int64_t s = 1; s <= steps; ++s) {
    mcmc_step(state, kernel, users, geom, sir_inv);
    if (thin > 0 && s % thin == 0) {
      trace.steps.push_back(state.step);
      trace.s_energy.push_back(state.config.interference_energy());
      trace.m_energy.push_back(state.config.congestion_energy());
      trace.accepted.push_back(state.last_accepted);
      for (const Trajectory& t : state.config.trajectories()) {
        trace.hop_histogram[t.hops()] += 1;
      }
      for (int m : state.config.incoming_counts()) {
        if (m >= static_cast<int>(trace.incoming_histogram.size())) {
          trace.incoming_histogram.resize(m + 1, 0);
        }
        trace.incoming_histogram[m] += 1;
      }
      if (keep_snapshots) trace.snapshots.push_back(state.config);
    }
  }
  return trace;
}

double default_anneal_c0(const UserConfiguration& users) {
  const double n = std::max(1, users.count());
  return users.lambda / (n * n);
}

AnnealResult anneal(const UserConfiguration& users,
                    const NetworkGeometry& geom, const PathLossModel& model,
                    double c0, std::int64_t t_max, std::uint64_t seed) {
  if (c0 <= 0.0) throw std::invalid_argument("anneal: c0 must be > 0");
  const Eigen::MatrixXd sir_inv = sir_inverse_table(users, model);
  ChainState state = make_chain_state(users, geom, sir_inv, seed);
  AnnealResult result{state.config,
                      geom.gamma * state.config.interference_energy() +
                          geom.beta * state.config.congestion_energy(),
                      0};
  for (std::int64_t t = 0; t < t_max; ++t) {
    const double ramp =
        std::min(1.0, c0 * std::log(static_cast<double>(t) + 1.0) /
                          geom.gamma);
    state.gamma_t = geom.gamma * ramp;
    state.beta_t = geom.beta * ramp;
    mcmc_step(state, ChainKernel::Metropolis, users, geom, sir_inv);
    const double e = geom.gamma * state.config.interference_energy() +
                     geom.beta * state.config.congestion_energy();
    if (e < result.best_energy - 1e-15) {
      result.best = state.config;
      result.best_energy = e;
      result.best_step = t + 1;
    }
  }
  return result;
}

void write_trace_csv(const ChainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  out << "step,S_energy,M_energy,accepted\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out << trace.steps[i] << "," << trace.s_energy[i] << ","
        << trace.m_energy[i] << "," << (trace.accepted[i] ? 1 : 0) << "\n";
  }
}

std::string configuration_json(const TrajectoryConfiguration& config) {
  std::ostringstream out;
  out << "[";
  bool first = true;
  for (const Trajectory& t : config.trajectories()) {
    if (!first) out << ",";
    first = false;
    out << "[";
    for (std::size_t i = 0; i < t.relays.size(); ++i) {
      if (i) out << ",";
      out << t.relays[i];
    }
    out << "]";
  }
  out << "]";
  return out.str();
}

}  // namespace hoplab
