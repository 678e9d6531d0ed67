#include "hoplab/pathloss.hpp"

#include <cmath>

namespace hoplab {

PathLossModel PathLossModel::ideal_hertz(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("pathloss: alpha must be > 0");
  return {PathLossKind::IdealHertz, alpha, 0.0};
}

PathLossModel PathLossModel::shifted_power(double shift, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("pathloss: alpha must be > 0");
  if (shift <= 0.0) throw std::invalid_argument("pathloss: shift must be > 0");
  return {PathLossKind::ShiftedPower, alpha, shift};
}

PathLossModel PathLossModel::exponential(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("pathloss: alpha must be > 0");
  return {PathLossKind::Exponential, alpha, 0.0};
}

double PathLossModel::operator()(double r) const {
  switch (kind) {
    case PathLossKind::IdealHertz:
      return r <= 1.0 ? 1.0 : std::pow(r, -alpha);
    case PathLossKind::ShiftedPower:
      return std::pow(shift + r, -alpha);
    case PathLossKind::Exponential:
      return std::exp(-alpha * r);
  }
  return 0.0;
}

double PathLossModel::derivative(double r) const {
  switch (kind) {
    case PathLossKind::IdealHertz:
      return r <= 1.0 ? 0.0 : -alpha * std::pow(r, -alpha - 1.0);
    case PathLossKind::ShiftedPower:
      return -alpha * std::pow(shift + r, -alpha - 1.0);
    case PathLossKind::Exponential:
      return -alpha * std::exp(-alpha * r);
  }
  return 0.0;
}

bool PathLossModel::integrable(int dimension) const {
  if (kind == PathLossKind::Exponential) return true;
  return alpha > static_cast<double>(dimension);
}

std::string PathLossModel::name() const {
  switch (kind) {
    case PathLossKind::IdealHertz:
      return "ideal_hertz";
    case PathLossKind::ShiftedPower:
      return "shifted_power";
    case PathLossKind::Exponential:
      return "exponential";
  }
  return "?";
}

double unit_ball_volume(int dimension) {
  const double pi = 3.14159265358979323846;
  return std::pow(pi, 0.5 * dimension) / std::tgamma(0.5 * dimension + 1.0);
}

double total_pathloss_mass_b(const PathLossModel& model, int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  const double d = static_cast<double>(dimension);
  const double a = model.alpha;
  const double wd = unit_ball_volume(dimension);
  switch (model.kind) {
    case PathLossKind::IdealHertz:
      if (!model.integrable(dimension)) {
        throw std::domain_error("total_pathloss_mass_b: diverges, alpha <= d");
      }
      return wd * a / (a - d);
    case PathLossKind::ShiftedPower: {
      if (!model.integrable(dimension)) {
        throw std::domain_error("total_pathloss_mass_b: diverges, alpha <= d");
      }
      const double k = model.shift;
      if (dimension == 1) return 2.0 * std::pow(k, 1.0 - a) / (a - 1.0);
      if (dimension == 2) {
        const double two_pi = 6.283185307179586476925286766559;
        return two_pi * std::pow(k, 2.0 - a) / ((a - 1.0) * (a - 2.0));
      }
      throw std::invalid_argument(
          "total_pathloss_mass_b: shifted power closed form for d in {1,2}");
    }
    case PathLossKind::Exponential:
      // d * w_d * Gamma(d) / alpha^d
      return d * wd * std::tgamma(d) / std::pow(a, d);
  }
  return 0.0;
}

}  // namespace hoplab
