#include "hoplab/subarea.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "hoplab/optimize.hpp"

namespace hoplab {

SubareaSpec::SubareaSpec(const NetworkGeometry& geom,
                         const PathLossModel& model, double field_tol)
    : geom_(geom),
      model_(model),
      field_(InterferenceField::build(geom, model, FieldSource::LebDelta,
                                      field_tol)) {
  if (!geom.subarea) {
    throw std::invalid_argument("SubareaSpec: geometry has no dense subarea");
  }
}

namespace {

std::vector<Vec2> ball_grid(const NetworkGeometry& geom, int n) {
  std::vector<Vec2> cells;
  const double r = geom.radius;
  if (geom.dimension == 1) {
    cells.reserve(n);
    for (int i = 0; i < n; ++i) {
      cells.emplace_back(-r + (i + 0.5) * 2.0 * r / n, 0.0);
    }
    return cells;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c(-r + (i + 0.5) * 2.0 * r / n, -r + (j + 0.5) * 2.0 * r / n);
      if (c.norm() <= r) cells.push_back(c);
    }
  }
  return cells;
}

Vec2 clip_to_ball(Vec2 x, double r) {
  const double norm = x.norm();
  if (norm > r) x *= r / norm;
  return x;
}

struct BallMin {
  Vec2 arg;
  double value;
  bool converged;
};

/// Scan the cells, then Nelder-Mead from the best few, clipped to the ball.
BallMin min_over_ball(const std::function<double(const Vec2&)>& f,
                      const std::vector<Vec2>& cells,
                      const NetworkGeometry& geom, double step) {
  std::vector<std::pair<double, Vec2>> ranked;
  ranked.reserve(cells.size());
  for (const Vec2& c : cells) ranked.emplace_back(f(c), c);
  std::partial_sort(
      ranked.begin(), ranked.begin() + std::min<std::size_t>(5, ranked.size()),
      ranked.end(),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  BallMin best{ranked[0].second, ranked[0].first, true};
  const double r = geom.radius;
  const int dims = geom.dimension;
  for (std::size_t c = 0; c < std::min<std::size_t>(5, ranked.size()); ++c) {
    if (dims == 1) {
      auto f1 = [&](double u) { return f(Vec2(u, 0.0)); };
      const double u0 = ranked[c].second.x();
      const ScalarMin m = golden_section(
          f1, std::max(-r, u0 - step), std::min(r, u0 + step), 1e-11);
      if (m.value < best.value) best = {Vec2(m.x, 0.0), m.value, true};
    } else {
      auto f2 = [&](const Eigen::VectorXd& v) {
        return f(clip_to_ball(Vec2(v[0], v[1]), r));
      };
      const NelderMeadResult m =
          nelder_mead(f2, ranked[c].second, step, 1e-13, 400);
      const Vec2 arg = clip_to_ball(Vec2(m.x[0], m.x[1]), r);
      if (m.value < best.value) best = {arg, m.value, m.converged};
    }
  }
  return best;
}

}  // namespace

TwoHopResult twohop_condition(const SubareaSpec& spec, int grid_n,
                              double margin_tol) {
  const NetworkGeometry& geom = spec.geometry();
  const PathLossModel& model = spec.model();
  const std::vector<Vec2> cells = ball_grid(geom, grid_n);
  const double step = 2.0 * geom.radius / grid_n;
  const double i_delta_o = spec.field().value_at(origin());

  // Joint minimization over (x0, x1): scan the cell product, then refine.
  double best = std::numeric_limits<double>::infinity();
  Vec2 bx0, bx1;
  auto margin = [&](const Vec2& x0, const Vec2& x1) {
    return spec.g_delta(x0, x1) + spec.g_delta(x1, origin()) -
           spec.g_delta(x0, origin());
  };
  for (const Vec2& x0 : cells) {
    const double direct = spec.g_delta(x0, origin());
    for (const Vec2& x1 : cells) {
      const double v =
          spec.g_delta(x0, x1) + spec.g_delta(x1, origin()) - direct;
      if (v < best) {
        best = v;
        bx0 = x0;
        bx1 = x1;
      }
    }
  }
  const int dims = geom.dimension;
  Eigen::VectorXd start(2 * dims);
  if (dims == 1) {
    start << bx0.x(), bx1.x();
  } else {
    start << bx0.x(), bx0.y(), bx1.x(), bx1.y();
  }
  auto packed = [&](const Eigen::VectorXd& v) {
    Vec2 x0, x1;
    if (dims == 1) {
      x0 = Vec2(v[0], 0.0);
      x1 = Vec2(v[1], 0.0);
    } else {
      x0 = Vec2(v[0], v[1]);
      x1 = Vec2(v[2], v[3]);
    }
    return margin(clip_to_ball(x0, geom.radius),
                  clip_to_ball(x1, geom.radius));
  };
  const NelderMeadResult refined = nelder_mead(packed, start, step, 1e-13,
                                               600);
  if (refined.value < best) {
    best = refined.value;
    if (dims == 1) {
      bx0 = clip_to_ball(Vec2(refined.x[0], 0.0), geom.radius);
      bx1 = clip_to_ball(Vec2(refined.x[1], 0.0), geom.radius);
    } else {
      bx0 = clip_to_ball(Vec2(refined.x[0], refined.x[1]), geom.radius);
      bx1 = clip_to_ball(Vec2(refined.x[2], refined.x[3]), geom.radius);
    }
  }

  // Denominator-free form of the same criterion.
  auto all_numerator = [&](const Vec2& x0, const Vec2& x1) {
    const double l1 = model(x1.norm());
    const double l01 = model((x0 - x1).norm());
    const double l0 = model(x0.norm());
    return l1 * spec.field().value_at(x1) + l01 * i_delta_o -
           l1 * l01 / l0 * i_delta_o;
  };
  double best_num = std::numeric_limits<double>::infinity();
  Vec2 nx0, nx1;
  for (const Vec2& x0 : cells) {
    for (const Vec2& x1 : cells) {
      const double v = all_numerator(x0, x1);
      if (v < best_num) {
        best_num = v;
        nx0 = x0;
        nx1 = x1;
      }
    }
  }
  Eigen::VectorXd start_num(2 * dims);
  if (dims == 1) {
    start_num << nx0.x(), nx1.x();
  } else {
    start_num << nx0.x(), nx0.y(), nx1.x(), nx1.y();
  }
  auto packed_num = [&](const Eigen::VectorXd& v) {
    Vec2 x0, x1;
    if (dims == 1) {
      x0 = Vec2(v[0], 0.0);
      x1 = Vec2(v[1], 0.0);
    } else {
      x0 = Vec2(v[0], v[1]);
      x1 = Vec2(v[2], v[3]);
    }
    return all_numerator(clip_to_ball(x0, geom.radius),
                         clip_to_ball(x1, geom.radius));
  };
  const NelderMeadResult refined_num =
      nelder_mead(packed_num, start_num, step, 1e-13, 600);
  best_num = std::min(best_num, refined_num.value);

  auto verdict_of = [&](double value) {
    if (value > margin_tol) return TwoHopVerdict::Holds;
    if (value < -margin_tol) return TwoHopVerdict::Fails;
    return TwoHopVerdict::Indeterminate;
  };
  TwoHopResult result;
  result.verdict = verdict_of(best);
  result.minimum = best;
  result.witness_x0 = bx0;
  result.witness_x1 = bx1;
  result.all_numerator_minimum = best_num;
  result.all_numerator_verdict = verdict_of(best_num);
  return result;
}

RateFieldResult ma_rate_field(const SubareaSpec& spec, int k_max,
                              std::span<const Vec2> grid, int inner_grid) {
  if (k_max != 2 && k_max != 3) {
    throw std::invalid_argument("ma_rate_field: k_max must be 2 or 3");
  }
  const NetworkGeometry& geom = spec.geometry();
  const std::vector<Vec2> cells = ball_grid(geom, inner_grid);
  const double step = 2.0 * geom.radius / inner_grid;

  auto xi = [&](const Vec2& y) {
    auto f = [&](const Vec2& z) {
      return spec.g_delta(y, z) + spec.g_delta(z, origin());
    };
    return min_over_ball(f, cells, geom, step);
  };

  // Denominator B(x0) = best unconstrained penalty from x0 (k <= k_max).
  std::vector<double> xi_cells(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    xi_cells[i] = xi(cells[i]).value;
  }
  auto denominator = [&](const Vec2& x0) {
    double b = std::min(spec.g_delta(x0, origin()), xi(x0).value);
    if (k_max == 3) {
      // Best three-hop penalty: scan the first relay against memoized xi.
      auto f = [&](const Vec2& x1) {
        double inner = std::numeric_limits<double>::infinity();
        // xi at an off-cell point: refine from the memoized scan level.
        auto g2 = [&](const Vec2& z) {
          return spec.g_delta(x1, z) + spec.g_delta(z, origin());
        };
        inner = min_over_ball(g2, cells, geom, step).value;
        return spec.g_delta(x0, x1) + inner;
      };
      double scan_best = std::numeric_limits<double>::infinity();
      Vec2 arg;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        const double v = spec.g_delta(x0, cells[j]) + xi_cells[j];
        if (v < scan_best) {
          scan_best = v;
          arg = cells[j];
        }
      }
      if (geom.dimension == 1) {
        auto f1 = [&](double u) { return f(Vec2(u, 0.0)); };
        const ScalarMin m = golden_section(
            f1, std::max(-geom.radius, arg.x() - step),
            std::min(geom.radius, arg.x() + step), 1e-9);
        scan_best = std::min(scan_best, m.value);
      } else {
        scan_best = std::min(scan_best, f(arg));
      }
      b = std::min(b, scan_best);
    }
    return b;
  };

  std::vector<double> b_cells(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    b_cells[i] = denominator(cells[i]);
  }

  RateFieldResult result;
  result.sup_rate = -std::numeric_limits<double>::infinity();
  for (const Vec2& x : grid) {
    const double g_x_o = spec.g_delta(x, origin());
    const double xi_x = k_max == 3 ? xi(x).value : 0.0;
    // Best constrained penalty through x minus B(x0), minimized over x0.
    auto objective_at_cell = [&](std::size_t i) {
      const Vec2& x0 = cells[i];
      double num = spec.g_delta(x0, x) + g_x_o;
      if (k_max == 3) {
        num = std::min(num, spec.g_delta(x0, x) + xi_x);
        double q = std::numeric_limits<double>::infinity();
        for (const Vec2& x1 : cells) {
          q = std::min(q, spec.g_delta(x0, x1) + spec.g_delta(x1, x));
        }
        num = std::min(num, q + g_x_o);
      }
      return num - b_cells[i];
    };
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = objective_at_cell(i);
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    // Refine the transmitter around the best cell with exact B evaluation.
    bool flagged = false;
    auto exact_objective = [&](const Vec2& x0) {
      double num = spec.g_delta(x0, x) + g_x_o;
      if (k_max == 3) {
        num = std::min(num, spec.g_delta(x0, x) + xi_x);
        auto f = [&](const Vec2& x1) {
          return spec.g_delta(x0, x1) + spec.g_delta(x1, x);
        };
        num = std::min(num, min_over_ball(f, cells, geom, step).value + g_x_o);
      }
      return num - denominator(x0);
    };
    if (geom.dimension == 1) {
      auto f1 = [&](double u) { return exact_objective(Vec2(u, 0.0)); };
      const double u0 = cells[best_i].x();
      const ScalarMin m = golden_section(
          f1, std::max(-geom.radius, u0 - step),
          std::min(geom.radius, u0 + step), 1e-10);
      best = std::min(best, m.value);
    } else {
      auto f2 = [&](const Eigen::VectorXd& v) {
        return exact_objective(clip_to_ball(Vec2(v[0], v[1]), geom.radius));
      };
      const NelderMeadResult m =
          nelder_mead(f2, cells[best_i], step, 1e-11, 200);
      best = std::min(best, m.value);
      flagged = !m.converged;
    }
    const double rate = -geom.gamma * best;
    result.cells.push_back({x, rate, flagged});
    result.sup_rate = std::max(result.sup_rate, rate);
  }
  return result;
}

DetourProfile local_detour_profile(const Vec2& x0, const Vec2& y0,
                                   const PathLossModel& model,
                                   std::span<const double> epsilons) {
  const double u = (x0 - y0).norm();
  const double v = y0.norm();
  auto f = [&](double eps) {
    return model(eps) / model(u + eps) + model(v) / model(v + eps);
  };
  DetourProfile profile;
  for (double eps : epsilons) {
    profile.epsilons.push_back(eps);
    profile.values.push_back(f(eps));
  }
  profile.derivative_at_zero =
      model.derivative(0.0) / model(u) -
      model(0.0) * model.derivative(u) / (model(u) * model(u)) -
      model.derivative(v) / model(v);
  const double h = 1e-6;
  profile.fd_derivative_at_zero =
      (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
  return profile;
}

double constrained_detour_min(const Vec2& x0, const Vec2& y0, double eps,
                              const PathLossModel& model, int angles) {
  double best = std::numeric_limits<double>::infinity();
  const double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < angles; ++i) {
    const double theta = two_pi * i / angles;
    const Vec2 x1 = y0 + eps * Vec2(std::cos(theta), std::sin(theta));
    const double value =
        model(eps) / model((x0 - x1).norm()) + model(y0.norm()) / model(x1.norm());
    best = std::min(best, value);
  }
  return best;
}

std::string twohop_report_json(const TwoHopResult& result) {
  auto verdict_str = [](TwoHopVerdict v) {
    switch (v) {
      case TwoHopVerdict::Holds:
        return "holds";
      case TwoHopVerdict::Fails:
        return "fails";
      default:
        return "indeterminate";
    }
  };
  std::ostringstream out;
  out << "{\"verdict\":\"" << verdict_str(result.verdict) << "\","
      << "\"margin\":" << result.minimum << ","
      << "\"witness_x0\":[" << result.witness_x0.x() << ","
      << result.witness_x0.y() << "],"
      << "\"witness_x1\":[" << result.witness_x1.x() << ","
      << result.witness_x1.y() << "],"
      << "\"all_numerator_margin\":" << result.all_numerator_minimum << ","
      << "\"all_numerator_verdict\":\""
      << verdict_str(result.all_numerator_verdict) << "\"}";
  return out.str();
}

}  // namespace hoplab
