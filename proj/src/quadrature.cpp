#include "hoplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hoplab {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double adaptive_simpson_split(const std::function<double(double)>& f, double a,
                              double b, const std::vector<double>& splits,
                              double tol, int max_depth) {
  std::vector<double> cuts{a};
  for (double s : splits) {
    if (s > a && s < b) cuts.push_back(s);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += adaptive_simpson(f, cuts[i], cuts[i + 1], piece_tol, max_depth);
  }
  return total;
}

void gauss_legendre(int n, Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double disk_integral(const std::function<double(const Eigen::Vector2d&)>& f,
                     double radius, double tol, int max_refine) {
  const double two_pi = 6.283185307179586476925286766559;
  int n_rad = 32, n_ang = 32;
  double previous = 0.0;
  bool have_previous = false;
  double value = 0.0;
  double last_delta = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= max_refine; ++level) {
    Eigen::ArrayXd nodes, weights;
    gauss_legendre(n_rad, nodes, weights);
    value = 0.0;
    for (int i = 0; i < n_rad; ++i) {
      const double rho = 0.5 * radius * (nodes[i] + 1.0);
      const double wr = 0.5 * radius * weights[i] * rho;
      double angular = 0.0;
      for (int j = 0; j < n_ang; ++j) {
        const double theta = two_pi * j / n_ang;
        angular += f(Eigen::Vector2d(rho * std::cos(theta),
                                     rho * std::sin(theta)));
      }
      value += wr * angular * (two_pi / n_ang);
    }
    if (have_previous) {
      const double scale = std::max(std::abs(value), 1e-300);
      last_delta = std::abs(value - previous);
      if (last_delta <= tol * scale) return value;
    }
    previous = value;
    have_previous = true;
    n_rad *= 2;
    n_ang *= 2;
  }
  throw QuadratureFailure("disk_integral: refinement budget exhausted",
                          last_delta);
}

}  // namespace hoplab
