#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hoplab {

struct QuadratureFailure : std::runtime_error {
  double achieved_error;
  QuadratureFailure(const std::string& what, double err)
      : std::runtime_error(what), achieved_error(err) {}
};

/// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 40);

/// Adaptive Simpson that first splits [a, b] at the given interior points
/// (kinks of the integrand), then integrates each piece adaptively.
double adaptive_simpson_split(const std::function<double(double)>& f, double a,
                              double b, const std::vector<double>& splits,
                              double tol = 1e-10, int max_depth = 40);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights);

/// Integral of f over the closed disk of the given radius centred at the
/// origin of the plane: Gauss-Legendre in the radial direction, trapezoid in
/// the angle, refined until the relative change drops below tol.
double disk_integral(const std::function<double(const Eigen::Vector2d&)>& f,
                     double radius, double tol = 1e-7, int max_refine = 6);

}  // namespace hoplab
