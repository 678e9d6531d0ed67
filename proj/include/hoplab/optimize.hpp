#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace hoplab {

struct ScalarMin {
  double x;
  double value;
};

/// Golden-section search on [a, b]; x tolerance on the bracket.
ScalarMin golden_section(const std::function<double(double)>& f, double a,
                         double b, double xtol = 1e-10);

/// Coarse scan on [a, b] at n points followed by golden-section refinement
/// around the best sample (guards against multimodality).
ScalarMin scan_then_golden(const std::function<double(double)>& f, double a,
                           double b, int n, double xtol = 1e-10);

/// Bisection root of f on [a, b]; requires a sign change.
std::optional<double> bisect_root(const std::function<double(double)>& f,
                                  double a, double b, double xtol = 1e-6);

/// Nelder-Mead in low dimension; returns best vertex.
struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  bool converged;
};
NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& start, double step, double ftol = 1e-12,
    int max_iter = 2000);

}  // namespace hoplab
