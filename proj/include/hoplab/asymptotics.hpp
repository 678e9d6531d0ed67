#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/limits.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

/// Parameters of the hop-count rate function t -> d t + b gamma t^(1-alpha).
struct RateFunctionParams {
  int dimension;
  double alpha;
  double gamma;
  double b;

  RateFunctionParams(int d, double alpha_, double gamma_, double b_);

  double rate(double t) const;
};

struct TStarResult {
  double t_star;
  double minimum;
};

/// Unique minimizer (b gamma (alpha-1)/d)^(1/alpha) and the attained minimum.
TStarResult t_star(const RateFunctionParams& params);

/// Algebraic closed form of the minimum, for cross-checks:
/// alpha/(alpha-1) * (b gamma (alpha-1) d^(alpha-1))^(1/alpha).
double rate_minimum_closed_form(const RateFunctionParams& params);

/// Solves log r0 = 1/l(r0/k) for the hop count k by monotone bisection.
/// Throws std::domain_error when r0 <= 1 or no root exists.
double hop_scale_solver(const PathLossModel& model, double r0);

struct ArgmaxKResult {
  std::vector<int> ks;
  std::vector<double> log_a;       // log a_k estimates
  std::vector<double> std_error;   // standard errors of log a_k
  int argmax_k = 0;
  bool resolved = false;           // separated from neighbours by > 2 se
};

/// Monte Carlo probe of k -> log a_k(x0). When `importance` is set the
/// relays are drawn as Gaussian perturbations of the equal-hop collinear
/// path (variance = hop length); otherwise uniformly.
ArgmaxKResult argmax_k_probe(const LimitKernel& kernel, const Vec2& x0,
                             std::span<const int> ks, int samples,
                             std::uint64_t seed, bool importance = true);

/// Single log a_k estimate with standard error (same estimator as the probe).
std::pair<double, double> log_a_k_estimate(const LimitKernel& kernel,
                                           const Vec2& x0, int k, int samples,
                                           std::uint64_t seed,
                                           bool importance = true);

/// Largest average radial-detour gap over hop subsets I of size >= ceil(dk),
/// normalized by log^(1/alpha) r0. The trajectory must end at the origin.
/// Throws std::invalid_argument when fewer than ceil(dk) hops are eligible.
double hop_deviation_statistic(std::span<const Vec2> trajectory, double r0,
                               double delta, double alpha);

struct StrongGammaResult {
  std::vector<Vec2> relays;          // minimizer of the k-hop penalty sum
  double minimum;                    // attained sum of g
  double max_line_distance;          // diagnostics over the relays
  bool norms_strictly_decreasing;
  bool stagnated;
};

/// Joint minimization of the k-hop penalty from x0 (coordinate descent with
/// per-relay line searches, multi-start); relays are searched over all of W.
StrongGammaResult strong_gamma_check(const LimitKernel& kernel, const Vec2& x0,
                                     int k, int multistarts = 32,
                                     std::uint64_t seed = 7);

/// m_{k_max}(x0): best penalty over k in [k_max] and all relay choices.
double min_penalty_over_k(const LimitKernel& kernel, const Vec2& x0,
                          int k_max);

struct GammaLadderPoint {
  double gamma;
  double log_t;   // log T^gamma(k, x_hat)
};

/// log T^gamma(k, x_hat) for each gamma in the ladder (k_max from the
/// geometry, quadrature-only so k_max <= 2 is required).
std::vector<GammaLadderPoint> gamma_ladder_log_density(
    const NetworkGeometry& base_geom, const PathLossModel& model,
    std::span<const double> gammas, const Vec2& x0, int k,
    std::span<const Vec2> relays);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hoplab
