#pragma once

// Photon-loss model for the success probability of one purification round.

#include <optional>
#include <vector>

namespace fepp {

struct LossParams {
  double eta_d = 0.28;  // single-photon detector efficiency
  double t_f = 0.2;     // fiber coupling and transmission, per photon
  double t_o = 0.9;     // other optical components, per photon
  std::optional<double> pair_rate;  // photon-pair attempts per second; no default

  static LossParams lossless();
  // Throws DomainError unless the efficiencies lie in (0, 1] and any rate is > 0.
  void validate() const;
};

// (F^2 + (1-F)^2) * t_f^2 * t_o^2 * eta_d^2
double total_success_prob(double fidelity, const LossParams& lp);

struct SweepRow {
  double fidelity;
  double ideal_prob;  // F^2 + (1-F)^2
  double total_prob;
};

// Uniform grid over [f_min, f_max] with `steps` points, endpoints included.
std::vector<SweepRow> sweep_success_prob(double f_min, double f_max, int steps, const LossParams& lp);

struct ExpectedTime {
  double seconds;  // +inf when the success probability is zero
  bool finite;
};

// Mean of the geometric waiting time, 1 / (p_total * pair_rate).
ExpectedTime expected_time_to_success(double p_total, const LossParams& lp);

}  // namespace fepp
