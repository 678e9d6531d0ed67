#include "hoplab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "hoplab/optimize.hpp"
#include "hoplab/quadrature.hpp"
#include "hoplab/rng.hpp"
#include "hoplab/users.hpp"

namespace hoplab {

namespace {

std::uint64_t hash_point(const Vec2& x) {
  std::uint64_t bits_x, bits_y;
  const double vx = x.x(), vy = x.y();
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&bits_x, &vx, 8);
  std::memcpy(&bits_y, &vy, 8);
  std::uint64_t s = bits_x ^ (bits_y * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

}  // namespace

LimitKernel::LimitKernel(NetworkGeometry geom, PathLossModel model,
                         int mc_budget, std::uint64_t seed, double field_tol,
                         double mc_rel_error_bound)
    : geom_(std::move(geom)),
      model_(model),
      field_(InterferenceField::build(geom_, model_, FieldSource::Mu,
                                      field_tol)),
      mu_total_(geom_.mu_total()),
      mc_budget_(mc_budget),
      seed_(seed),
      mc_rel_error_bound_(mc_rel_error_bound) {
  if (mc_budget_ < 1000) {
    throw std::invalid_argument("LimitKernel: MC budget must be >= 1000");
  }
}

double LimitKernel::path_penalty(const Vec2& x0,
                                 std::span<const Vec2> relays) const {
  double total = 0.0;
  Vec2 prev = x0;
  for (const Vec2& x : relays) {
    total += g(prev, x);
    prev = x;
  }
  total += g(prev, origin());
  return total;
}

ValueWithError LimitKernel::a2_quadrature(const Vec2& x0) const {
  const double gamma = geom_.gamma;
  const double go = field_.value_at(origin());
  auto penalty = [&](const Vec2& x1) {
    return g(x0, x1) + go / model_(x1.norm());
  };
  // Shift by an approximate minimum so the integrand is O(1); keeps the
  // result accurate in relative terms even when a_2 is exponentially small.
  double shift = std::numeric_limits<double>::infinity();
  const int scan = 257;
  if (geom_.dimension == 1) {
    for (int i = 0; i < scan; ++i) {
      const double u = -geom_.radius + 2.0 * geom_.radius * i / (scan - 1.0);
      shift = std::min(shift, penalty(Vec2(u, 0.0)));
    }
    auto f = [&](double t) {
      return std::exp(-gamma * (penalty(Vec2(t, 0.0)) - shift));
    };
    std::vector<double> splits{x0.x(), 0.0};
    if (model_.kind == PathLossKind::IdealHertz) {
      splits.insert(splits.end(), {x0.x() - 1.0, x0.x() + 1.0, -1.0, 1.0});
    }
    const double integral = adaptive_simpson_split(
        f, -geom_.radius, geom_.radius, splits, 1e-12);
    return {geom_.mu_scale * integral / mu_total_ * std::exp(-gamma * shift),
            0.0, false, false};
  }
  const double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 32; ++j) {
      const double rho = geom_.radius * (i + 0.5) / 64.0;
      const double theta = two_pi * j / 32.0;
      shift = std::min(
          shift, penalty(Vec2(rho * std::cos(theta), rho * std::sin(theta))));
    }
  }
  shift = std::min(shift, penalty(origin()));
  auto f = [&](const Vec2& x1) {
    return std::exp(-gamma * (penalty(x1) - shift));
  };
  const double integral = disk_integral(f, geom_.radius, 1e-6);
  return {geom_.mu_scale * integral / mu_total_ * std::exp(-gamma * shift),
          0.0, false, false};
}

ValueWithError LimitKernel::a_k_monte_carlo(
    const Vec2& x0, int k, std::span<const std::uint64_t> shard_seeds,
    int samples_per_shard) const {
  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n = 0;
  std::vector<Vec2> relays(k - 1);
  for (std::uint64_t shard_seed : shard_seeds) {
    Rng rng(shard_seed);
    for (int s = 0; s < samples_per_shard; ++s) {
      for (int l = 0; l < k - 1; ++l) {
        relays[l] = sample_in_ball(geom_.dimension, geom_.radius, rng);
      }
      const double w = std::exp(-geom_.gamma * path_penalty(x0, relays));
      sum += w;
      sum_sq += w * w;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(n));
  const bool flagged = mean > 0.0 && se / mean > mc_rel_error_bound_;
  return {mean, se, true, flagged};
}

ValueWithError LimitKernel::a_k(const Vec2& x0, int k) const {
  if (k < 1) throw std::invalid_argument("a_k: k must be >= 1");
  if (!geom_.contains(x0)) throw std::invalid_argument("a_k: x0 outside W");
  if (k == 1) {
    return {std::exp(-geom_.gamma * g(x0, origin())), 0.0, false, false};
  }
  if (k == 2) return a2_quadrature(x0);
  std::uint64_t base = seed_ ^ (static_cast<std::uint64_t>(k) << 32) ^
                       hash_point(x0);
  const std::uint64_t shard_seed = seed_for(base, 0);
  return a_k_monte_carlo(x0, k, std::span(&shard_seed, 1), mc_budget_);
}

ValueWithError LimitKernel::normalizer_A(const Vec2& x0) const {
  double sum = 0.0, var = 0.0;
  bool mc = false, flagged = false;
  for (int k = 1; k <= geom_.k_max; ++k) {
    const ValueWithError ak = a_k(x0, k);
    sum += ak.value;
    var += ak.std_error * ak.std_error;
    mc = mc || ak.monte_carlo;
    flagged = flagged || ak.flagged;
  }
  const double a_val = 1.0 / sum;
  const double se = a_val * a_val * std::sqrt(var);
  return {a_val, se, mc, flagged};
}

TypicalTrajectoryDensity LimitKernel::typical_density(const Vec2& x0) const {
  TypicalTrajectoryDensity t;
  t.x0 = x0;
  double sum = 0.0, var = 0.0;
  bool mc = false, flagged = false;
  for (int k = 1; k <= geom_.k_max; ++k) {
    t.a.push_back(a_k(x0, k));
    sum += t.a.back().value;
    var += t.a.back().std_error * t.a.back().std_error;
    mc = mc || t.a.back().monte_carlo;
    flagged = flagged || t.a.back().flagged;
  }
  const double a_val = 1.0 / sum;
  t.normalizer = {a_val, a_val * a_val * std::sqrt(var), mc, flagged};
  for (int k = 1; k <= geom_.k_max; ++k) {
    t.hop_marginal.push_back(t.normalizer.value * t.a[k - 1].value);
  }
  return t;
}

double LimitKernel::log_density_value(const TypicalTrajectoryDensity& t, int k,
                                      std::span<const Vec2> relays) const {
  if (k < 1 || k > t.k_max()) {
    throw std::invalid_argument("density_value: k out of range");
  }
  if (static_cast<int>(relays.size()) != k - 1) {
    throw std::invalid_argument("density_value: need k-1 relays");
  }
  return std::log(t.normalizer.value) -
         (k - 1) * std::log(mu_total_) -
         geom_.gamma * path_penalty(t.x0, relays);
}

double LimitKernel::density_value(const TypicalTrajectoryDensity& t, int k,
                                  std::span<const Vec2> relays) const {
  return std::exp(log_density_value(t, k, relays));
}

std::vector<std::pair<double, double>> LimitKernel::nu1_density_profile(
    std::span<const double> radii) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double rho : radii) {
    const Vec2 x0(rho, 0.0);
    const ValueWithError a = normalizer_A(x0);
    const double density =
        a.value * std::exp(-geom_.gamma * g(x0, origin()));
    out.emplace_back(rho, density);
  }
  return out;
}

OptimalRelay LimitKernel::optimal_relay(const Vec2& x0) const {
  if (geom_.k_max < 2) {
    throw std::invalid_argument("optimal_relay: needs k_max >= 2");
  }
  if (!geom_.contains(x0)) {
    throw std::invalid_argument("optimal_relay: x0 outside W");
  }
  const double tie_tol = 1e-9;
  if (model_.strictly_decreasing() && x0.norm() > 0.0) {
    // Minimizers lie on the segment [x0, o]; 1-d search in the fraction.
    auto f = [&](double t) {
      const Vec2 x1 = t * x0;
      return g(x0, x1) + g(x1, origin());
    };
    const int n = 513;
    std::vector<double> values(n);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      values[i] = f(i / (n - 1.0));
      best = std::min(best, values[i]);
    }
    // Refine every near-optimal local basin; keep the smallest |x1| answer.
    double best_t = 1.0;
    double best_value = std::numeric_limits<double>::infinity();
    int basins = 0;
    const double h = 1.0 / (n - 1.0);
    for (int i = 0; i < n; ++i) {
      const bool local_min =
          (i == 0 || values[i] <= values[i - 1]) &&
          (i == n - 1 || values[i] <= values[i + 1]);
      if (!local_min || values[i] > best + 1e-6) continue;
      const double lo = std::max(0.0, i * h - h);
      const double hi = std::min(1.0, i * h + h);
      const ScalarMin m = golden_section(f, lo, hi, 1e-12);
      if (m.value < best_value - tie_tol) {
        best_value = m.value;
        best_t = m.x;
        basins = 1;
      } else if (std::abs(m.value - best_value) <= tie_tol &&
                 std::abs(m.x - best_t) > 1e-6) {
        ++basins;
        if (m.x < best_t) best_t = m.x;
      }
    }
    return {best_t * x0, best_value, basins > 1};
  }
  // Weakly decreasing path loss (or x0 = o): search all of W.
  if (geom_.dimension == 1) {
    auto f = [&](double u) {
      const Vec2 x1(u, 0.0);
      return g(x0, x1) + g(x1, origin());
    };
    const int n = 2049;
    const double r = geom_.radius;
    std::vector<double> values(n);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      values[i] = f(-r + 2.0 * r * i / (n - 1.0));
      best = std::min(best, values[i]);
    }
    double best_u = 0.0, best_value = std::numeric_limits<double>::infinity();
    int basins = 0;
    const double h = 2.0 * r / (n - 1.0);
    for (int i = 0; i < n; ++i) {
      const bool local_min =
          (i == 0 || values[i] <= values[i - 1]) &&
          (i == n - 1 || values[i] <= values[i + 1]);
      if (!local_min || values[i] > best + 1e-6) continue;
      const double u = -r + i * h;
      const ScalarMin m =
          golden_section(f, std::max(-r, u - h), std::min(r, u + h), 1e-12);
      if (m.value < best_value - tie_tol) {
        best_value = m.value;
        best_u = m.x;
        basins = 1;
      } else if (std::abs(m.value - best_value) <= tie_tol &&
                 std::abs(m.x - best_u) > 1e-6) {
        ++basins;
        if (std::abs(m.x) < std::abs(best_u)) best_u = m.x;
      }
    }
    return {Vec2(best_u, 0.0), best_value, basins > 1};
  }
  // d = 2, weakly decreasing: coarse grid plus Nelder-Mead refinement.
  auto f = [&](const Vec2& x1) { return g(x0, x1) + g(x1, origin()); };
  const int n = 201;
  const double r = geom_.radius;
  double best_value = std::numeric_limits<double>::infinity();
  Vec2 best_x = origin();
  std::vector<std::pair<double, Vec2>> cells;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c(-r + 2.0 * r * i / (n - 1.0), -r + 2.0 * r * j / (n - 1.0));
      if (c.norm() > r) continue;
      cells.emplace_back(f(c), c);
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  bool multiple = false;
  for (int c = 0; c < std::min<std::size_t>(5, cells.size()); ++c) {
    auto clipped = [&](const Eigen::VectorXd& v) {
      Vec2 p(v[0], v[1]);
      if (p.norm() > r) p *= r / p.norm();
      return f(p);
    };
    NelderMeadResult res = nelder_mead(clipped, cells[c].second, 2.0 * r / n);
    Vec2 p(res.x[0], res.x[1]);
    if (p.norm() > r) p *= r / p.norm();
    if (res.value < best_value - tie_tol) {
      best_value = res.value;
      best_x = p;
      multiple = false;
    } else if (std::abs(res.value - best_value) <= tie_tol &&
               (p - best_x).norm() > 1e-6) {
      multiple = true;
      if (p.norm() < best_x.norm()) best_x = p;
    }
  }
  return {best_x, best_value, multiple};
}

double LimitKernel::two_hop_min_value(const Vec2& x0) const {
  return optimal_relay(x0).value;
}

std::optional<double> LimitKernel::transition_radius_r0star(
    double xtol) const {
  auto f = [&](double rho) {
    const Vec2 x0(rho, 0.0);
    return g(x0, origin()) - two_hop_min_value(x0);
  };
  const int n = 64;
  double prev_rho = 0.0, prev_val = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double rho = geom_.radius * i / (n - 1.0);
    const double val = f(rho);
    if ((prev_val <= 0.0) != (val <= 0.0)) {
      return bisect_root(f, prev_rho, rho, xtol);
    }
    prev_rho = rho;
    prev_val = val;
  }
  return std::nullopt;
}

IncomingHopResult LimitKernel::incoming_hop_measure(
    std::span<const Vec2> grid) const {
  if (geom_.k_max < 2) {
    IncomingHopResult res;
    res.grid.assign(grid.begin(), grid.end());
    res.density.assign(grid.size(), ValueWithError{});
    res.total_mass = ValueWithError{};
    return res;
  }
  const RadialProfiles& prof = radial_profiles();
  const double gamma = geom_.gamma;
  const double go = field_.value_at(origin());

  IncomingHopResult res;
  res.grid.assign(grid.begin(), grid.end());
  res.density.reserve(grid.size());
  for (const Vec2& x : grid) {
    // k = 2 term by quadrature over the transmitter.
    double value = 0.0, var = 0.0;
    bool mc = false, flagged = false;
    auto integrand = [&](const Vec2& x0) {
      return prof.normalizer(x0.norm()) *
             std::exp(-gamma * (g(x0, x) + go / model_(x.norm())));
    };
    if (geom_.dimension == 1) {
      auto f1 = [&](double u) { return integrand(Vec2(u, 0.0)); };
      value += geom_.mu_scale / mu_total_ * geom_.mu_scale *
               adaptive_simpson_split(f1, -geom_.radius, geom_.radius,
                                      {x.x() - 1.0, x.x(), x.x() + 1.0},
                                      1e-10);
    } else {
      value += geom_.mu_scale / mu_total_ * geom_.mu_scale *
               disk_integral(integrand, geom_.radius, 1e-6);
    }
    // k >= 3 terms by Monte Carlo over transmitter and free relays.
    for (int k = 3; k <= geom_.k_max; ++k) {
      for (int slot = 1; slot <= k - 1; ++slot) {
        std::uint64_t base = seed_ ^ hash_point(x) ^
                             (static_cast<std::uint64_t>(k * 64 + slot) << 40);
        Rng rng(seed_for(base, 1));
        const int n = mc_budget_;
        double sum = 0.0, sum_sq = 0.0;
        std::vector<Vec2> relays(k - 1);
        for (int s = 0; s < n; ++s) {
          const Vec2 x0 = sample_in_ball(geom_.dimension, geom_.radius, rng);
          for (int l = 1; l <= k - 1; ++l) {
            relays[l - 1] =
                l == slot
                    ? x
                    : sample_in_ball(geom_.dimension, geom_.radius, rng);
          }
          const double w = prof.normalizer(x0.norm()) *
                           std::exp(-gamma * path_penalty(x0, relays));
          sum += w;
          sum_sq += w * w;
        }
        const double mean = sum / n;
        const double v = std::max(0.0, sum_sq / n - mean * mean);
        value += geom_.mu_scale * mean;
        var += geom_.mu_scale * geom_.mu_scale * v / n;
        mc = true;
      }
    }
    const double se = std::sqrt(var);
    flagged = mc && value > 0.0 && se / value > mc_rel_error_bound_;
    res.density.push_back({value, se, mc, flagged});
  }

  // Total mass via M(W) = sum_k (k-1) nu_k(W) = sum_k (k-1) int mu(dx0) A a_k.
  double total = 0.0, total_var = 0.0;
  bool total_mc = false;
  for (int k = 2; k <= geom_.k_max; ++k) {
    auto f = [&](double rho) {
      return prof.normalizer(rho) * prof.a[k - 1](rho);
    };
    double mass = 0.0;
    if (geom_.dimension == 1) {
      mass = 2.0 * geom_.mu_scale *
             adaptive_simpson([&](double rho) { return f(rho); }, 0.0,
                              geom_.radius, 1e-10);
    } else {
      const double two_pi = 6.283185307179586476925286766559;
      mass = geom_.mu_scale * two_pi *
             adaptive_simpson([&](double rho) { return rho * f(rho); }, 0.0,
                              geom_.radius, 1e-10);
    }
    total += (k - 1) * mass;
    if (k >= 3) total_mc = true;
  }
  res.total_mass = {total, std::sqrt(total_var), total_mc, false};
  return res;
}

double LimitKernel::variational_objective(
    const DiscretizedTrajectoryFamily& family, double admissibility_tol) const {
  const int n = family.cells();
  const int kmax = family.k_max();
  if (kmax < 1) throw std::invalid_argument("family: no densities");
  // Admissibility: sum_k pi_0 nu_k = mu on the grid.
  double max_dev = 0.0;
  for (int i = 0; i < n; ++i) {
    double mass = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      const std::vector<double>& f = family.densities[k - 1];
      std::int64_t block = 1;
      for (int l = 1; l < k; ++l) block *= n;
      // pi_0 density at i: integrate the relay coordinates out.
      double acc = 0.0;
      for (std::int64_t rest = 0; rest < block; ++rest) {
        double weight = 1.0;
        std::int64_t code = rest;
        for (int l = 1; l < k; ++l) {
          weight *= family.cell_mu[code % n];
          code /= n;
        }
        acc += f[i * block + rest] * weight;
      }
      mass += acc;
    }
    max_dev = std::max(max_dev, std::abs(mass - 1.0));
  }
  if (max_dev > admissibility_tol) throw AdmissibilityError(max_dev);

  // Entropy + gamma * energy.
  double entropy = 0.0, energy = 0.0, relay_mass = 0.0;
  std::vector<Vec2> path;
  for (int k = 1; k <= kmax; ++k) {
    const std::vector<double>& f = family.densities[k - 1];
    std::int64_t cells_k = 1;
    for (int l = 0; l < k; ++l) cells_k *= n;
    for (std::int64_t idx = 0; idx < cells_k; ++idx) {
      const double density = f[idx];
      if (density < 0.0) {
        throw std::invalid_argument("family: negative density");
      }
      double weight = 1.0;
      std::int64_t code = idx;
      path.assign(k, Vec2::Zero());
      for (int l = k - 1; l >= 0; --l) {
        const int cell = static_cast<int>(code % n);
        code /= n;
        path[l] = family.centers[cell];
        weight *= family.cell_mu[cell];
      }
      if (density == 0.0) continue;  // 0 log 0 = 0
      const double mass = density * weight;
      entropy += mass * std::log(density);
      double penalty = 0.0;
      for (int l = 1; l < k; ++l) penalty += g(path[l - 1], path[l]);
      penalty += g(path[k - 1], origin());
      energy += mass * penalty;
      relay_mass += (k - 1) * mass;
    }
  }
  entropy += std::log(mu_total_) * relay_mass;
  return entropy + geom_.gamma * energy;
}

DiscretizedTrajectoryFamily LimitKernel::minimizer_family(int n) const {
  if (geom_.dimension != 1) {
    throw std::invalid_argument("minimizer_family: d = 1 only");
  }
  if (geom_.k_max > 2) {
    throw std::invalid_argument("minimizer_family: k_max <= 2 only");
  }
  DiscretizedTrajectoryFamily family;
  const double r = geom_.radius;
  const double width = 2.0 * r / n;
  for (int i = 0; i < n; ++i) {
    family.centers.emplace_back(-r + (i + 0.5) * width, 0.0);
    family.cell_mu.push_back(geom_.mu_scale * width);
  }
  const double go = field_.value_at(origin());
  std::vector<double> f1(n), f2;
  if (geom_.k_max == 2) f2.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vec2 x0 = family.centers[i];
    double sum = std::exp(-geom_.gamma * g(x0, origin()));
    f1[i] = sum;
    if (geom_.k_max == 2) {
      for (int j = 0; j < n; ++j) {
        const Vec2 x1 = family.centers[j];
        const double w = std::exp(
            -geom_.gamma * (g(x0, x1) + go / model_(x1.norm())));
        f2[static_cast<std::size_t>(i) * n + j] = w / mu_total_;
        sum += w / mu_total_ * family.cell_mu[j];
      }
    }
    // Renormalize so the grid mass balance is exact.
    f1[i] /= sum;
    if (geom_.k_max == 2) {
      for (int j = 0; j < n; ++j) f2[static_cast<std::size_t>(i) * n + j] /= sum;
    }
  }
  family.densities.push_back(std::move(f1));
  if (geom_.k_max == 2) family.densities.push_back(std::move(f2));
  return family;
}

const LimitKernel::RadialProfiles& LimitKernel::radial_profiles(
    int nodes) const {
  if (profiles_ && profile_nodes_ >= nodes) return *profiles_;
  RadialProfiles prof;
  Eigen::ArrayXd radii = Eigen::ArrayXd::LinSpaced(nodes, 0.0, geom_.radius);
  std::vector<Eigen::ArrayXd> a_values(geom_.k_max,
                                       Eigen::ArrayXd::Zero(nodes));
  Eigen::ArrayXd inv_norm(nodes);
  for (int i = 0; i < nodes; ++i) {
    const Vec2 x0(radii[i], 0.0);
    double sum = 0.0;
    for (int k = 1; k <= geom_.k_max; ++k) {
      const double v = a_k(x0, k).value;
      a_values[k - 1][i] = v;
      sum += v;
    }
    inv_norm[i] = 1.0 / sum;
  }
  prof.normalizer = RadialTable(radii, inv_norm);
  for (int k = 1; k <= geom_.k_max; ++k) {
    prof.a.emplace_back(radii, a_values[k - 1]);
  }
  profiles_ = std::move(prof);
  profile_nodes_ = nodes;
  return *profiles_;
}

}  // namespace hoplab
