#include "hoplab/interference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hoplab/quadrature.hpp"

namespace hoplab {

RadialTable::RadialTable(Eigen::ArrayXd radii, Eigen::ArrayXd values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  const Eigen::Index n = radii_.size();
  if (n < 4) throw std::invalid_argument("RadialTable: need >= 4 nodes");
  second_.resize(n);
  const double h = radii_[1] - radii_[0];
  // Uniform grid, not-a-knot ends: M_1 and M_{n-2} decouple, the rest is a
  // tridiagonal solve; M_0 and M_{n-1} follow by linear extrapolation.
  Eigen::ArrayXd d(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    d[i] = (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / h;
  }
  second_[1] = d[1] / h;
  second_[n - 2] = d[n - 2] / h;
  const Eigen::Index m = n - 4;  // unknowns M_2 .. M_{n-3}
  if (m > 0) {
    Eigen::ArrayXd diag = Eigen::ArrayXd::Constant(m, 2.0 * h / 3.0);
    Eigen::ArrayXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) rhs[i] = d[i + 2];
    rhs[0] -= (h / 6.0) * second_[1];
    rhs[m - 1] -= (h / 6.0) * second_[n - 2];
    // Thomas algorithm with constant off-diagonals h/6.
    const double off = h / 6.0;
    for (Eigen::Index i = 1; i < m; ++i) {
      const double w = off / diag[i - 1];
      diag[i] -= w * off;
      rhs[i] -= w * rhs[i - 1];
    }
    second_[m + 1] = rhs[m - 1] / diag[m - 1];
    for (Eigen::Index i = m - 2; i >= 0; --i) {
      second_[i + 2] = (rhs[i] - off * second_[i + 3]) / diag[i];
    }
  }
  second_[0] = 2.0 * second_[1] - second_[2];
  second_[n - 1] = 2.0 * second_[n - 2] - second_[n - 3];
}

double RadialTable::operator()(double rho) const {
  const Eigen::Index n = radii_.size();
  const double lo = radii_[0], hi = radii_[n - 1];
  if (rho < lo) rho = lo;
  if (rho > hi) rho = hi;
  const double h = radii_[1] - radii_[0];
  Eigen::Index i = static_cast<Eigen::Index>((rho - lo) / h);
  if (i > n - 2) i = n - 2;
  const double a = radii_[i], b = radii_[i + 1];
  const double t1 = b - rho, t2 = rho - a;
  return second_[i] * t1 * t1 * t1 / (6.0 * h) +
         second_[i + 1] * t2 * t2 * t2 / (6.0 * h) +
         (values_[i] / h - second_[i] * h / 6.0) * t1 +
         (values_[i + 1] / h - second_[i + 1] * h / 6.0) * t2;
}

namespace {

/// Integral of l(|z - x|) dz over the d-ball of radius support centred at the
/// origin of the component frame, x at distance rho from that centre.
/// In d = 2 the angular direction is integrated analytically: the integrand
/// collapses to l(s) times the arc length of the circle of radius s around x
/// that lies inside the disk, leaving a 1-d adaptive quadrature in s.
double radial_component(const PathLossModel& model, int dimension,
                        double support, double rho, double tol) {
  if (dimension == 1) {
    auto f = [&](double z) { return model(std::abs(z - rho)); };
    // Split at the evaluation point and at the IdealHertz kink offsets.
    std::vector<double> splits{rho};
    if (model.kind == PathLossKind::IdealHertz) {
      splits.push_back(rho - 1.0);
      splits.push_back(rho + 1.0);
    }
    return adaptive_simpson_split(f, -support, support, splits, tol);
  }
  const double two_pi = 6.283185307179586476925286766559;
  if (rho < 1e-12) {
    auto f = [&](double s) { return two_pi * s * model(s); };
    std::vector<double> splits{1.0};
    return adaptive_simpson_split(f, 0.0, support, splits, tol, 48);
  }
  auto arc = [&](double s) {
    if (s <= support - rho) return two_pi * s;
    const double c = (s * s + rho * rho - support * support) /
                     (2.0 * s * rho);
    return 2.0 * s * std::acos(std::clamp(c, -1.0, 1.0));
  };
  auto f = [&](double s) { return model(s) * arc(s); };
  const double lo = std::max(0.0, rho - support);
  const double hi = rho + support;
  std::vector<double> splits{std::abs(support - rho), 1.0};
  return adaptive_simpson_split(f, lo, hi, splits, tol, 48);
}

struct ComponentSpec {
  Vec2 center;
  double support;
  double weight;
};

ComponentSpec base_spec(const NetworkGeometry& geom) {
  return {Vec2::Zero(), geom.radius, geom.mu_scale};
}

ComponentSpec delta_spec(const NetworkGeometry& geom, double weight) {
  if (!geom.subarea) {
    throw std::invalid_argument("interference: geometry has no dense subarea");
  }
  return {geom.subarea->center, geom.subarea->radius, weight};
}

RadialTable tabulate(const PathLossModel& model, int dimension,
                     const ComponentSpec& spec, double eval_range, int nodes,
                     double quad_tol) {
  Eigen::ArrayXd radii = Eigen::ArrayXd::LinSpaced(nodes, 0.0, eval_range);
  Eigen::ArrayXd values(nodes);
  for (int i = 0; i < nodes; ++i) {
    values[i] =
        radial_component(model, dimension, spec.support, radii[i], quad_tol);
  }
  return RadialTable(std::move(radii), std::move(values));
}

}  // namespace

double InterferenceField::direct_value(const NetworkGeometry& geom,
                                       const PathLossModel& model,
                                       FieldSource source, const Vec2& x,
                                       double tol) {
  double v = 0.0;
  if (source == FieldSource::Mu || source == FieldSource::MuA) {
    const ComponentSpec s = base_spec(geom);
    v += s.weight * radial_component(model, geom.dimension, s.support,
                                     (x - s.center).norm(), tol);
  }
  if (source == FieldSource::LebDelta || source == FieldSource::MuA) {
    const double w =
        source == FieldSource::LebDelta ? 1.0 : geom.subarea->weight;
    const ComponentSpec s = delta_spec(geom, w);
    v += s.weight * radial_component(model, geom.dimension, s.support,
                                     (x - s.center).norm(), tol);
  }
  return v;
}

InterferenceField InterferenceField::build(const NetworkGeometry& geom,
                                           const PathLossModel& model,
                                           FieldSource source, double tol,
                                           int initial_nodes) {
  geom.validate();
  InterferenceField field;
  field.source_ = source;
  field.tol_ = tol;

  struct Part {
    ComponentSpec spec;
    double range;
    RadialTable* table;
    Vec2* center;
    double* weight;
  };
  std::vector<Part> parts;
  if (source == FieldSource::Mu || source == FieldSource::MuA) {
    parts.push_back({base_spec(geom), geom.radius, &field.base_,
                     &field.base_center_, &field.base_weight_});
  }
  if (source == FieldSource::LebDelta || source == FieldSource::MuA) {
    const double w =
        source == FieldSource::LebDelta ? 1.0 : geom.subarea->weight;
    ComponentSpec spec = delta_spec(geom, w);
    const double range = geom.radius + spec.center.norm() + 1e-9;
    if (source == FieldSource::LebDelta) {
      parts.push_back({spec, range, &field.base_, &field.base_center_,
                       &field.base_weight_});
    } else {
      field.has_extra_ = true;
      parts.push_back({spec, range, &field.extra_, &field.extra_center_,
                       &field.extra_weight_});
    }
  }

  const double quad_tol = std::min(tol * 1e-2, 1e-9);
  double worst = 0.0;
  for (Part& part : parts) {
    *part.center = part.spec.center;
    *part.weight = part.spec.weight;
    int nodes = initial_nodes;
    const int max_nodes = 4096;
    for (;;) {
      RadialTable table = tabulate(model, geom.dimension, part.spec,
                                   part.range, nodes, quad_tol);
      // Validate the interpolant at cell midpoints against direct quadrature.
      double err = 0.0;
      const int checks = 33;
      for (int c = 0; c < checks; ++c) {
        const double rho =
            part.range * (c + 0.5) / static_cast<double>(checks);
        const double direct = radial_component(model, geom.dimension,
                                               part.spec.support, rho,
                                               quad_tol);
        err = std::max(err, std::abs(table(rho) - direct));
      }
      if (err <= tol || nodes >= max_nodes) {
        *part.table = std::move(table);
        worst = std::max(worst, err);
        if (err > tol) {
          throw QuadratureFailure(
              "InterferenceField: validation error above tolerance", err);
        }
        break;
      }
      nodes *= 2;
    }
  }
  field.achieved_error_ = worst;
  return field;
}

double InterferenceField::value_at(const Vec2& x) const {
  double v = base_weight_ * base_((x - base_center_).norm());
  if (has_extra_) v += extra_weight_ * extra_((x - extra_center_).norm());
  return v;
}

void InterferenceField::write_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "radius,value\n";
  const Eigen::ArrayXd& r = base_.radii();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    out << r[i] << "," << value_at(Vec2(r[i], 0.0)) << "\n";
  }
}

double g_eval(const InterferenceField& field, const PathLossModel& model,
              const Vec2& x, const Vec2& y) {
  return field.value_at(y) / model((x - y).norm());
}

}  // namespace hoplab
