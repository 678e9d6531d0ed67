#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "hoplab/pathloss.hpp"

namespace hoplab {

/// All positions live in the plane; for dimension 1 the second coordinate
/// stays 0 so the same formulas serve both supported dimensions.
using Vec2 = Eigen::Vector2d;

inline Vec2 origin() { return Vec2::Zero(); }

/// Optional densely populated subarea: a closed ball inside W carrying an
/// extra intensity a * Leb restricted to it.
struct DenseSubarea {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double weight = 0.0;  // a
};

/// Communication area W = closed ball of the given radius around the origin,
/// base intensity mu = mu_scale * Leb|_W, interference weight gamma,
/// congestion weight beta, hop cap k_max.
struct NetworkGeometry {
  int dimension = 1;
  double radius = 1.0;
  double gamma = 1.0;
  double beta = 0.0;
  int k_max = 2;
  double mu_scale = 1.0;
  std::optional<DenseSubarea> subarea;

  NetworkGeometry() = default;
  NetworkGeometry(int dim, double r, double gamma_, double beta_, int kmax,
                  double mu_scale_ = 1.0,
                  std::optional<DenseSubarea> sub = std::nullopt)
      : dimension(dim),
        radius(r),
        gamma(gamma_),
        beta(beta_),
        k_max(kmax),
        mu_scale(mu_scale_),
        subarea(std::move(sub)) {
    validate();
  }

  void validate() const {
    if (dimension != 1 && dimension != 2) {
      throw std::invalid_argument("geometry: dimension must be 1 or 2");
    }
    if (radius <= 0.0) throw std::invalid_argument("geometry: radius <= 0");
    // gamma = 0 is the degenerate uniform case (used by the profile ladder).
    if (gamma < 0.0) throw std::invalid_argument("geometry: gamma < 0");
    if (beta < 0.0) throw std::invalid_argument("geometry: beta < 0");
    if (k_max < 1) throw std::invalid_argument("geometry: k_max < 1");
    if (mu_scale <= 0.0) throw std::invalid_argument("geometry: mu_scale <= 0");
    if (subarea) {
      if (subarea->weight < 0.0) {
        throw std::invalid_argument("geometry: subarea weight < 0");
      }
      if (subarea->radius <= 0.0) {
        throw std::invalid_argument("geometry: subarea radius <= 0");
      }
      if (subarea->center.norm() + subarea->radius > radius + 1e-12) {
        throw std::invalid_argument("geometry: subarea not contained in W");
      }
      if (dimension == 1 && subarea->center.y() != 0.0) {
        throw std::invalid_argument("geometry: 1-d subarea center off axis");
      }
    }
  }

  bool contains(const Vec2& x) const { return x.norm() <= radius + 1e-12; }

  /// Lebesgue volume of a ball of radius rho in this dimension.
  double ball_volume(double rho) const {
    return unit_ball_volume(dimension) * std::pow(rho, dimension);
  }

  /// mu(W) for the base measure (without the dense subarea).
  double mu_total() const { return mu_scale * ball_volume(radius); }

  /// mu^a(W) = mu(W) + a Leb(Delta).
  double mu_a_total() const {
    double total = mu_total();
    if (subarea) total += subarea->weight * ball_volume(subarea->radius);
    return total;
  }
};

}  // namespace hoplab
