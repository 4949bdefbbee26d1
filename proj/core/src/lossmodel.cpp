#include "fepp/lossmodel.hpp"

#include "fepp/errors.hpp"
#include "fepp/protocol.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fepp {
namespace {
void check_efficiency(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0, 1]");
  }
}
}  // namespace

LossParams LossParams::lossless() { return {1.0, 1.0, 1.0, std::nullopt}; }

void LossParams::validate() const {
  check_efficiency(eta_d, "eta_d");
  check_efficiency(t_f, "t_f");
  check_efficiency(t_o, "t_o");
  if (pair_rate && (!std::isfinite(*pair_rate) || !(*pair_rate > 0.0))) {
    throw DomainError("pair_rate must be positive");
  }
}

double total_success_prob(double fidelity, const LossParams& lp) {
  lp.validate();
  const double transmission = lp.t_f * lp.t_f * lp.t_o * lp.t_o * lp.eta_d * lp.eta_d;
  return success_prob_ideal(fidelity) * transmission;
}

std::vector<SweepRow> sweep_success_prob(double f_min, double f_max, int steps, const LossParams& lp) {
  lp.validate();
  if (!(0.5 < f_min && f_min < f_max && f_max < 1.0)) {
    throw DomainError("sweep range must satisfy 0.5 < f_min < f_max < 1");
  }
  if (steps < 2) throw DomainError("sweep needs at least two steps");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  const double step = (f_max - f_min) / (steps - 1);
  for (int k = 0; k < steps; ++k) {
    const double f = k == steps - 1 ? f_max : f_min + k * step;
    rows.push_back({f, success_prob_ideal(f), total_success_prob(f, lp)});
  }
  return rows;
}

ExpectedTime expected_time_to_success(double p_total, const LossParams& lp) {
  lp.validate();
  if (!lp.pair_rate) throw ContractError("expected_time_to_success needs a pair rate");
  if (!std::isfinite(p_total) || p_total < 0.0 || p_total > 1.0) {
    throw DomainError("success probability must lie in [0, 1]");
  }
  if (p_total == 0.0) return {std::numeric_limits<double>::infinity(), false};
  return {1.0 / (p_total * *lp.pair_rate), true};
}

}  // namespace fepp
