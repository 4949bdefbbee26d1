#include "fepp/errors.hpp"
#include "fepp/protocol.hpp"

#include <cmath>
#include <string>

namespace fepp {
namespace {
void check_open_unit(double f, const char* what) {
  if (!(f > 0.0 && f < 1.0)) {
    throw DomainError(std::string(what) + ": fidelity must lie in (0, 1), got " + std::to_string(f));
  }
}
}  // namespace

double fidelity_map(double fidelity) {
  check_open_unit(fidelity, "fidelity_map");
  const double good = fidelity * fidelity;
  const double bad = (1.0 - fidelity) * (1.0 - fidelity);
  return good / (good + bad);
}

double success_prob_ideal(double fidelity) {
  check_open_unit(fidelity, "success_prob_ideal");
  return fidelity * fidelity + (1.0 - fidelity) * (1.0 - fidelity);
}

IterationTrace iterate_rounds(double initial_fidelity, int n_rounds, bool alternate_errors) {
  check_open_unit(initial_fidelity, "iterate_rounds");
  if (n_rounds < 1) throw DomainError("iterate_rounds: need at least one round");

  IterationTrace trace;
  if (initial_fidelity <= 0.5) {
    trace.warning = "initial fidelity <= 0.5: rounds do not increase fidelity";
  }
  trace.fidelities.push_back(initial_fidelity);
  trace.cumulative_pairs.push_back(1.0);

  BellMixture current = alternate_errors ? BellMixture::phase_flip(initial_fidelity)
                                         : BellMixture::bit_flip(initial_fidelity);
  double pairs = 1.0;
  for (int round = 0; round < n_rounds; ++round) {
    if (alternate_errors) current = convert_phase_to_bit(current);
    trace.round_inputs.push_back(current);

    const double f = current.p_phi_plus;
    // The map saturates at 1 in floating point; treat the limit as exact.
    const double p_success = f < 1.0 ? success_prob_ideal(f) : 1.0;
    const double next = f < 1.0 ? fidelity_map(f) : 1.0;
    pairs = 2.0 * pairs / p_success;

    trace.success_probs.push_back(p_success);
    trace.fidelities.push_back(next);
    trace.cumulative_pairs.push_back(pairs);
    current = alternate_errors ? BellMixture::phase_flip(next) : BellMixture::bit_flip(next);
  }
  return trace;
}

}  // namespace fepp
