#include "platoonlab/idm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "platoonlab/vehicle_dynamics.hpp"

namespace platoonlab {

double idm_accel(double v, double dv, double gap, const IdmParams& p) {
  if (!(gap > 0.0)) throw std::domain_error("idm_accel: gap must be positive");
  // approach rate is ego-minus-leader speed, i.e. -dv
  const double s_star = p.s0 + v * p.T + v * (-dv) / (2.0 * std::sqrt(p.a * p.b));
  const double raw =
      p.a * (1.0 - std::pow(v / p.v0, p.delta) - (s_star / gap) * (s_star / gap));
  return std::clamp(raw, Action::kMin, Action::kMax);
}

double idm_equilibrium_gap(double v, const IdmParams& p) {
  if (v < 0.0) throw std::invalid_argument("idm_equilibrium_gap: v must be >= 0");
  if (v >= p.v0) {
    throw std::domain_error("idm_equilibrium_gap: no finite equilibrium at v >= v0");
  }
  return (p.s0 + v * p.T) / std::sqrt(1.0 - std::pow(v / p.v0, p.delta));
}

}  // namespace platoonlab
