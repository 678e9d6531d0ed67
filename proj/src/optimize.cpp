#include "hoplab/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace hoplab {

ScalarMin golden_section(const std::function<double(double)>& f, double a,
                         double b, double xtol) {
  const double phi = 0.6180339887498948482;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

ScalarMin scan_then_golden(const std::function<double(double)>& f, double a,
                           double b, int n, double xtol) {
  double best_x = a, best_f = f(a);
  for (int i = 1; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1.0);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double h = (b - a) / (n - 1.0);
  const double lo = std::max(a, best_x - h);
  const double hi = std::min(b, best_x + h);
  ScalarMin refined = golden_section(f, lo, hi, xtol);
  if (best_f < refined.value) return {best_x, best_f};
  return refined;
}

std::optional<double> bisect_root(const std::function<double(double)>& f,
                                  double a, double b, double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) return std::nullopt;
  while (b - a > xtol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& start, double step, double ftol, int max_iter) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (int i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  auto order = [&]() {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> v2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (std::abs(values[n] - values[0]) <=
        ftol * (std::abs(values[0]) + ftol)) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    Eigen::VectorXd reflected = centroid + (centroid - simplex[n]);
    double fr = f(reflected);
    if (fr < values[0]) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[n]);
      double fe = f(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      Eigen::VectorXd contracted = centroid + 0.5 * (simplex[n] - centroid);
      double fc = f(contracted);
      if (fc < values[n]) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = f(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], values[0], converged};
}

}  // namespace hoplab
