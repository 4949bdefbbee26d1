#pragma once

// One round of the two-photon Faraday-rotation purification protocol.
//
// Register order for the 6-qubit round is (p1, p2, a1, a2, b1, b2): Alice
// holds photon p1 and atoms a1, a2; Bob holds p2, b1, b2. Pair 1 lives on
// (a1, b1) and pair 2 on (a2, b2). Photon basis |L> = |0>, |R> = |1>.

#include "fepp/faraday.hpp"
#include "fepp/qstate.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fepp {

enum class BellLabel { PhiPlus = 0, PsiPlus = 1, PhiMinus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kBellLabels = {
    BellLabel::PhiPlus, BellLabel::PsiPlus, BellLabel::PhiMinus, BellLabel::PsiMinus};

PureState bell_state(BellLabel label);
std::string to_string(BellLabel label);

// Bell-diagonal two-qubit state.
struct BellMixture {
  double p_phi_plus = 1.0;
  double p_psi_plus = 0.0;
  double p_phi_minus = 0.0;
  double p_psi_minus = 0.0;

  // F |phi+><phi+| + (1-F) |psi+><psi+|
  static BellMixture bit_flip(double fidelity);
  // F |phi+><phi+| + (1-F) |phi-><phi-|
  static BellMixture phase_flip(double fidelity);

  std::array<double, 4> weights() const { return {p_phi_plus, p_psi_plus, p_phi_minus, p_psi_minus}; }
  double weight(BellLabel label) const { return weights()[static_cast<std::size_t>(label)]; }

  // Throws ContractError unless all weights are >= 0, finite, and sum to 1 within 1e-12.
  void validate() const;

  bool operator==(const BellMixture&) const = default;
};

DensityOp bell_mixture_to_density(const BellMixture& m);

// Bilateral Hadamard in the Bell basis: phi- <-> psi+, others fixed.
BellMixture convert_phase_to_bit(const BellMixture& m);

enum class Polarization { L = 0, R = 1 };
char to_char(Polarization p);

struct RoundConfig {
  PhotonAtomGate gate;       // photon (x) atom (x) atom, applied on each side
  Operator photon_hadamard;  // L -> (L+R)/sqrt2, R -> (L-R)/sqrt2
  Operator atom_hadamard;    // 0 -> (0+1)/sqrt2, 1 -> (0-1)/sqrt2

  // Composite of two ideal single-cavity gates.
  static RoundConfig ideal();
  // Composite built from two identical cavities with the given parameters.
  static RoundConfig from_cavity(const CavityParams& params);

  // Throws ContractError unless the gate is two-atom and both Hadamards are unitary.
  void validate() const;
};

struct RoundOutcome {
  std::array<Polarization, 2> detectors;       // (Alice, Bob)
  std::optional<std::array<int, 2>> atoms;     // (a2, b2) results, only on kept branches
  bool kept = false;
  double probability = 0.0;                    // conditional on both photons surviving
  bool correction_applied = false;             // Z on b1 for atom patterns 01/10
  std::optional<DensityOp> post_state;         // a1 b1 state; kept branches with nonzero weight
};

struct RoundResult {
  std::vector<RoundOutcome> outcomes;
  // Probability both photons survive the (possibly lossy) cavity reflections.
  double photon_survival = 1.0;

  double absorption_loss() const { return 1.0 - photon_survival; }
  double total_probability() const;
  double kept_probability() const;
  // Kept-branch average state on (a1, b1); empty if nothing is kept.
  std::optional<DensityOp> kept_state() const;
  // Fidelity of kept_state() with |phi+>.
  std::optional<double> kept_fidelity() const;
};

// Exact round by decomposing the inputs into the 16 pure Bell-pair products.
RoundResult run_round_exact(const BellMixture& pair1, const BellMixture& pair2,
                            const RoundConfig& cfg = RoundConfig::ideal());

// Same round evolved as a single 64x64 density operator.
RoundResult run_round_density(const BellMixture& pair1, const BellMixture& pair2,
                              const RoundConfig& cfg = RoundConfig::ideal());

// Per-branch record for one pure Bell-pair input, used by the exact engine
// and by the Monte Carlo sampler.
struct PureBranch {
  std::array<Polarization, 2> detectors;
  std::optional<std::array<int, 2>> atoms;
  bool kept;
  double probability;         // unconditional: includes photon survival
  std::optional<PureState> post_state;  // normalized 6-qubit state after correction
  double fidelity;            // fidelity of the (a1, b1) reduced state with |phi+>, 0 if none
};

struct PureRoundResult {
  std::vector<PureBranch> branches;
  double photon_survival;
};

PureRoundResult run_round_pure(BellLabel pair1, BellLabel pair2, const RoundConfig& cfg);

// F^2 / (F^2 + (1-F)^2); DomainError outside (0, 1).
double fidelity_map(double fidelity);
// F^2 + (1-F)^2; DomainError outside (0, 1).
double success_prob_ideal(double fidelity);

struct IterationTrace {
  std::vector<double> fidelities;        // round 0 is the input
  std::vector<double> success_probs;     // one per round
  std::vector<double> cumulative_pairs;  // raw pairs per surviving pair, round 0 = 1
  std::vector<BellMixture> round_inputs; // mixture entering each round, after any conversion
  std::optional<std::string> warning;
};

// Repeated rounds from the closed-form fidelity map. With alternate_errors the
// residual error is treated as phase-flip type and converted before each round.
IterationTrace iterate_rounds(double initial_fidelity, int n_rounds, bool alternate_errors = false);

}  // namespace fepp
