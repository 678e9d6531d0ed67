#include "hoplab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hoplab/optimize.hpp"
#include "hoplab/rng.hpp"
#include "hoplab/users.hpp"

namespace hoplab {

RateFunctionParams::RateFunctionParams(int d, double alpha_, double gamma_,
                                       double b_)
    : dimension(d), alpha(alpha_), gamma(gamma_), b(b_) {
  if (alpha <= dimension) {
    throw std::invalid_argument("rate function: needs alpha > d");
  }
  if (b <= 0.0 || gamma <= 0.0) {
    throw std::invalid_argument("rate function: needs b, gamma > 0");
  }
}

double RateFunctionParams::rate(double t) const {
  return dimension * t + b * gamma * std::pow(t, 1.0 - alpha);
}

TStarResult t_star(const RateFunctionParams& p) {
  const double t = std::pow(p.b * p.gamma * (p.alpha - 1.0) / p.dimension,
                            1.0 / p.alpha);
  return {t, p.rate(t)};
}

double rate_minimum_closed_form(const RateFunctionParams& p) {
  return p.alpha / (p.alpha - 1.0) *
         std::pow(p.b * p.gamma * (p.alpha - 1.0) *
                      std::pow(static_cast<double>(p.dimension), p.alpha - 1.0),
                  1.0 / p.alpha);
}

double hop_scale_solver(const PathLossModel& model, double r0) {
  if (r0 <= 1.0) {
    throw std::domain_error("hop_scale_solver: out of regime, needs r0 > 1");
  }
  const double target = std::log(r0);
  // 1/l(r0/k) decreases in k towards 1/l(0); a root needs log r0 above that.
  if (target <= 1.0 / model(0.0)) {
    throw std::domain_error("hop_scale_solver: no root, log r0 <= 1/l(0)");
  }
  auto h = [&](double k) { return 1.0 / model(r0 / k) - target; };
  double lo = 1e-9, hi = 1.0;
  while (h(hi) > 0.0) hi *= 2.0;
  // Bisection on k to high precision.
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> log_a_k_estimate(const LimitKernel& kernel,
                                           const Vec2& x0, int k, int samples,
                                           std::uint64_t seed,
                                           bool importance) {
  const NetworkGeometry& geom = kernel.geometry();
  const double gamma = geom.gamma;
  const double log_mu_w = std::log(kernel.mu_total());
  Rng rng(seed);
  if (k == 1) {
    return {-gamma * kernel.g(x0, origin()), 0.0};
  }
  std::vector<double> log_terms;
  log_terms.reserve(samples);
  std::vector<Vec2> relays(k - 1);
  const double sigma = std::sqrt(std::max(x0.norm() / k, 1e-6));
  const double log_norm_const =
      -0.5 * std::log(2.0 * 3.14159265358979323846 * sigma * sigma);
  for (int s = 0; s < samples; ++s) {
    double log_q = 0.0;
    bool inside = true;
    if (importance) {
      for (int l = 1; l <= k - 1; ++l) {
        const Vec2 center = x0 * (static_cast<double>(k - l) / k);
        Vec2 x = center;
        double lq = 0.0;
        for (int c = 0; c < geom.dimension; ++c) {
          const double z = rng.normal();
          x[c] = center[c] + sigma * z;
          lq += log_norm_const - 0.5 * z * z;
        }
        if (x.norm() > geom.radius) inside = false;
        relays[l - 1] = x;
        log_q += lq;
      }
    } else {
      for (int l = 0; l < k - 1; ++l) {
        relays[l] = sample_in_ball(geom.dimension, geom.radius, rng);
      }
      // Uniform proposal density over W (per relay).
      log_q = -(k - 1) * std::log(geom.ball_volume(geom.radius));
    }
    if (!inside) {
      log_terms.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const double log_f = -gamma * kernel.path_penalty(x0, relays);
    // a_k = E_q[ exp(log_f) / (mu(W)^{k-1} q) ] with mu-normalized relays.
    log_terms.push_back(log_f - log_q -
                        (k - 1) * (log_mu_w - std::log(geom.mu_scale)));
  }
  const double max_log =
      *std::max_element(log_terms.begin(), log_terms.end());
  if (!std::isfinite(max_log)) {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  double sum = 0.0, sum_sq = 0.0;
  for (double lt : log_terms) {
    const double w = std::exp(lt - max_log);
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double se_rel = std::sqrt(var / n) / mean;  // se of log by delta rule
  return {max_log + std::log(mean), se_rel};
}

ArgmaxKResult argmax_k_probe(const LimitKernel& kernel, const Vec2& x0,
                             std::span<const int> ks, int samples,
                             std::uint64_t seed, bool importance) {
  ArgmaxKResult result;
  result.ks.assign(ks.begin(), ks.end());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto [log_a, se] = log_a_k_estimate(kernel, x0, ks[i], samples,
                                              seed_for(seed, i), importance);
    result.log_a.push_back(log_a);
    result.std_error.push_back(se);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (result.log_a[i] > result.log_a[best]) best = i;
  }
  result.argmax_k = result.ks[best];
  // Resolved when the maximum clears its neighbours by > 2 combined standard
  // errors and the profile is not flat to numerical noise.
  result.resolved = true;
  const double flat_eps = 1e-3;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i == best) continue;
    const bool neighbour = std::abs(result.ks[i] - result.argmax_k) <= 1;
    if (!neighbour) continue;
    const double gap = result.log_a[best] - result.log_a[i];
    const double combined = 2.0 * std::hypot(result.std_error[best],
                                             result.std_error[i]);
    if (gap <= combined || gap <= flat_eps) result.resolved = false;
  }
  double lo = *std::min_element(result.log_a.begin(), result.log_a.end());
  double hi = result.log_a[best];
  if (hi - lo <= flat_eps) result.resolved = false;
  return result;
}

double hop_deviation_statistic(std::span<const Vec2> trajectory, double r0,
                               double delta, double alpha) {
  if (trajectory.size() < 2) {
    throw std::invalid_argument("hop_deviation_statistic: need >= 1 hop");
  }
  if (trajectory.back().norm() > 1e-9) {
    throw std::invalid_argument(
        "hop_deviation_statistic: trajectory must end at the origin");
  }
  const int k = static_cast<int>(trajectory.size()) - 1;
  const int min_size = static_cast<int>(std::ceil(delta * k));
  if (k - 1 < min_size || min_size < 1) {
    throw std::invalid_argument(
        "hop_deviation_statistic: fewer eligible hops than ceil(delta k)");
  }
  // Per-hop detour gaps for hops 1..k-1 (the final hop into o has gap 0).
  std::vector<double> gaps;
  gaps.reserve(k - 1);
  for (int l = 1; l <= k - 1; ++l) {
    const double hop = (trajectory[l - 1] - trajectory[l]).norm();
    const double radial =
        std::abs(trajectory[l - 1].norm() - trajectory[l].norm());
    gaps.push_back(hop - radial);
  }
  std::sort(gaps.begin(), gaps.end(), std::greater<double>());
  // The top-m average is nonincreasing in m, so m = ceil(delta k) attains the
  // maximum over all eligible subset sizes.
  double acc = 0.0;
  for (int i = 0; i < min_size; ++i) acc += gaps[i];
  const double avg = acc / min_size;
  return avg / std::pow(std::log(r0), 1.0 / alpha);
}

namespace {

double path_value(const LimitKernel& kernel, const Vec2& x0,
                  const std::vector<Vec2>& relays) {
  return kernel.path_penalty(x0, relays);
}

}  // namespace

StrongGammaResult strong_gamma_check(const LimitKernel& kernel, const Vec2& x0,
                                     int k, int multistarts,
                                     std::uint64_t seed) {
  const NetworkGeometry& geom = kernel.geometry();
  const double r = geom.radius;
  const Vec2 dir = x0.norm() > 0.0 ? Vec2(x0 / x0.norm()) : Vec2(1.0, 0.0);
  const Vec2 perp(-dir.y(), dir.x());
  Rng rng(seed);

  StrongGammaResult best;
  best.minimum = std::numeric_limits<double>::infinity();
  best.stagnated = false;

  for (int start = 0; start < multistarts; ++start) {
    std::vector<Vec2> relays(k - 1);
    for (int l = 1; l <= k - 1; ++l) {
      if (start == 0) {
        relays[l - 1] = x0 * (static_cast<double>(k - l) / k);
      } else {
        relays[l - 1] = sample_in_ball(geom.dimension, r, rng);
      }
    }
    double value = path_value(kernel, x0, relays);
    bool stagnated = true;
    for (int sweep = 0; sweep < 200; ++sweep) {
      const double before = value;
      for (int l = 0; l < k - 1; ++l) {
        const Vec2 left = l == 0 ? x0 : relays[l - 1];
        const Vec2 right = l == k - 2 ? origin() : relays[l + 1];
        auto hop_cost = [&](const Vec2& x) {
          return kernel.g(left, x) + kernel.g(x, right);
        };
        // Two 1-d line searches: along the transmitter axis, then across it.
        Vec2 x = relays[l];
        for (int pass = 0; pass < 2; ++pass) {
          const Vec2 axis = pass == 0 ? dir : perp;
          auto f = [&](double s) {
            Vec2 candidate = x + s * axis;
            if (candidate.norm() > r) return 1e100;
            return hop_cost(candidate);
          };
          const ScalarMin m = scan_then_golden(f, -2.0 * r, 2.0 * r, 65,
                                               1e-12);
          x += m.x * axis;
          if (geom.dimension == 1) break;  // no cross-axis freedom
        }
        relays[l] = x;
      }
      value = path_value(kernel, x0, relays);
      if (before - value < 1e-10) {
        stagnated = false;
        break;
      }
    }
    if (value < best.minimum) {
      best.relays = relays;
      best.minimum = value;
      best.stagnated = stagnated;
    }
  }

  best.max_line_distance = 0.0;
  best.norms_strictly_decreasing = true;
  double prev_norm = x0.norm();
  for (const Vec2& x : best.relays) {
    // Distance to the line through x0 and o.
    const double dist = geom.dimension == 1
                            ? 0.0
                            : std::abs(perp.dot(x));
    best.max_line_distance = std::max(best.max_line_distance, dist);
    if (x.norm() >= prev_norm - 1e-12) best.norms_strictly_decreasing = false;
    prev_norm = x.norm();
  }
  if (prev_norm <= 0.0) best.norms_strictly_decreasing = false;
  return best;
}

double min_penalty_over_k(const LimitKernel& kernel, const Vec2& x0,
                          int k_max) {
  double best = kernel.g(x0, origin());
  for (int k = 2; k <= k_max; ++k) {
    const StrongGammaResult res = strong_gamma_check(kernel, x0, k, 8);
    best = std::min(best, res.minimum);
  }
  return best;
}

std::vector<GammaLadderPoint> gamma_ladder_log_density(
    const NetworkGeometry& base_geom, const PathLossModel& model,
    std::span<const double> gammas, const Vec2& x0, int k,
    std::span<const Vec2> relays) {
  if (base_geom.k_max > 2) {
    throw std::invalid_argument(
        "gamma_ladder_log_density: quadrature path needs k_max <= 2");
  }
  std::vector<GammaLadderPoint> out;
  for (double gamma : gammas) {
    NetworkGeometry geom = base_geom;
    geom.gamma = gamma;
    LimitKernel kernel(geom, model);
    double sum = 0.0;
    for (int kk = 1; kk <= geom.k_max; ++kk) {
      sum += kernel.a_k(x0, kk).value;
    }
    const double log_a_norm = -std::log(sum);
    const double penalty = kernel.path_penalty(x0, relays);
    out.push_back({gamma, log_a_norm - (k - 1) * std::log(kernel.mu_total()) -
                              gamma * penalty});
  }
  return out;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace hoplab
