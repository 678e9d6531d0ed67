#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/interference.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

/// Dense subarea Delta with its interference field; g_delta(x, y) is the
/// large-a limit of g^a(x, y)/a, the effective per-hop penalty when the
/// interference is dominated by Delta.
class SubareaSpec {
 public:
  SubareaSpec(const NetworkGeometry& geom, const PathLossModel& model,
              double field_tol = 1e-6);

  const NetworkGeometry& geometry() const { return geom_; }
  const PathLossModel& model() const { return model_; }
  const InterferenceField& field() const { return field_; }

  double g_delta(const Vec2& x, const Vec2& y) const {
    return field_.value_at(y) / model_((x - y).norm());
  }

 private:
  NetworkGeometry geom_;
  PathLossModel model_;
  InterferenceField field_;
};

enum class TwoHopVerdict { Holds, Fails, Indeterminate };

struct TwoHopResult {
  TwoHopVerdict verdict;
  double minimum;            // attained min of the two-hop-vs-direct margin
  Vec2 witness_x0, witness_x1;
  double all_numerator_minimum;    // same criterion, denominator-free form
  TwoHopVerdict all_numerator_verdict;
};

/// Decides whether the best effective two-hop penalty uniformly exceeds the
/// direct one: min over (x0, x1) of
/// g_delta(x0,x1) + g_delta(x1,o) - g_delta(x0,o) > 0. Also evaluates the
/// equivalent all-numerator form and reports both verdicts.
TwoHopResult twohop_condition(const SubareaSpec& spec, int grid_n = 64,
                              double margin_tol = 1e-9);

struct RateFieldCell {
  Vec2 x;
  double rate;      // per-point limit of (1/a) log dM^a/dLeb
  bool flagged;     // local refinement did not converge
};

struct RateFieldResult {
  std::vector<RateFieldCell> cells;
  double sup_rate;
};

/// The limiting exponential decay rate field of the incoming-hop measure for
/// k_max in {2, 3}; negative everywhere exactly when the two-hop condition
/// holds.
RateFieldResult ma_rate_field(const SubareaSpec& spec, int k_max,
                              std::span<const Vec2> grid, int inner_grid = 64);

struct DetourProfile {
  std::vector<double> epsilons;
  std::vector<double> values;       // f~(eps)
  double derivative_at_zero;        // closed form
  double fd_derivative_at_zero;     // one-sided finite difference
};

/// Local detour diagnostic around a point mass at y0:
/// f~(eps) = l(eps)/l(|x0-y0|+eps) + l(|y0|)/l(|y0|+eps).
DetourProfile local_detour_profile(const Vec2& x0, const Vec2& y0,
                                   const PathLossModel& model,
                                   std::span<const double> epsilons);

/// Constrained two-hop penalty min over |x1 - y0| = eps by angular scan
/// (the oracle f~ upper-bounds).
double constrained_detour_min(const Vec2& x0, const Vec2& y0, double eps,
                              const PathLossModel& model, int angles = 720);

std::string twohop_report_json(const TwoHopResult& result);

}  // namespace hoplab
