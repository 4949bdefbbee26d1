#include "fepp/errors.hpp"
#include "fepp/protocol.hpp"

#include <array>
#include <cmath>

namespace fepp {
namespace {

constexpr std::size_t kP1 = 0, kP2 = 1, kA1 = 2, kA2 = 3, kB1 = 4, kB2 = 5;
constexpr std::array<std::size_t, 3> kAliceGateTargets{kP1, kA1, kA2};
constexpr std::array<std::size_t, 3> kBobGateTargets{kP2, kB1, kB2};
constexpr std::array<std::size_t, 2> kPairOne{kA1, kB1};
// (a1, b1, a2, b2) -> (a1, a2, b1, b2)
constexpr std::array<std::size_t, 4> kPairsToSides{0, 2, 1, 3};

template <std::size_t N>
std::span<const std::size_t> targets(const std::array<std::size_t, N>& t) {
  return {t.data(), t.size()};
}

std::span<const std::size_t> one(const std::size_t& t) { return {&t, 1}; }

const PureState& plus_photon() {
  static const PureState plus = [] {
    const double s = 1.0 / std::sqrt(2.0);
    const std::array<Cplx, 2> amp{s, s};
    return PureState::from_amplitudes(amp);
  }();
  return plus;
}

// Fixed enumeration of the round's branches: LL x 4 atom patterns, LR, RL, RR x 4.
struct BranchKey {
  std::array<Polarization, 2> detectors;
  std::optional<std::array<int, 2>> atoms;
  bool kept() const { return detectors[0] == detectors[1]; }
};

const std::vector<BranchKey>& branch_layout() {
  static const std::vector<BranchKey> layout = [] {
    std::vector<BranchKey> keys;
    for (Polarization d1 : {Polarization::L, Polarization::R}) {
      for (Polarization d2 : {Polarization::L, Polarization::R}) {
        if (d1 != d2) {
          keys.push_back({{d1, d2}, std::nullopt});
          continue;
        }
        for (int ma = 0; ma < 2; ++ma) {
          for (int mb = 0; mb < 2; ++mb) keys.push_back({{d1, d2}, std::array<int, 2>{ma, mb}});
        }
      }
    }
    return keys;
  }();
  return layout;
}

PureState photons_and_atoms(BellLabel pair1, BellLabel pair2) {
  const PureState atoms = permute_qubits(kron(bell_state(pair1), bell_state(pair2)), kPairsToSides);
  return kron(kron(plus_photon(), plus_photon()), atoms);
}

DensityOp photons_and_atoms(const BellMixture& pair1, const BellMixture& pair2) {
  const DensityOp atoms = permute_qubits(
      kron(bell_mixture_to_density(pair1), bell_mixture_to_density(pair2)), kPairsToSides);
  const DensityOp plus = DensityOp::from_pure(plus_photon());
  return kron(kron(plus, plus), atoms);
}

template <typename State>
State reflect_and_rotate(const State& in, const RoundConfig& cfg) {
  const Operator gate = cfg.gate.to_operator();
  State s = apply_on(in, gate, targets(kAliceGateTargets));
  s = apply_on(s, gate, targets(kBobGateTargets));
  s = apply_on(s, cfg.photon_hadamard, one(kP1));
  return apply_on(s, cfg.photon_hadamard, one(kP2));
}

PureState basis_vector(int bit) { return PureState::basis(1, static_cast<std::size_t>(bit)); }

}  // namespace

char to_char(Polarization p) { return p == Polarization::L ? 'L' : 'R'; }

RoundConfig RoundConfig::ideal() {
  return {two_cavity_gate(ideal_gate(), ideal_gate()), gates::hadamard(), gates::hadamard()};
}

RoundConfig RoundConfig::from_cavity(const CavityParams& params) {
  const PhotonAtomGate single = single_cavity_gate(params);
  return {two_cavity_gate(single, single), gates::hadamard(), gates::hadamard()};
}

void RoundConfig::validate() const {
  if (gate.dim() != 8) throw ContractError("round gate must act on photon and two atoms");
  if (photon_hadamard.dim() != 2 || atom_hadamard.dim() != 2) {
    throw ContractError("Hadamards must be single-qubit operators");
  }
  if (!photon_hadamard.is_unitary() || !atom_hadamard.is_unitary()) {
    throw ContractError("Hadamards must be unitary");
  }
}

double RoundResult::total_probability() const {
  double p = 0.0;
  for (const auto& o : outcomes) p += o.probability;
  return p;
}

double RoundResult::kept_probability() const {
  double p = 0.0;
  for (const auto& o : outcomes) {
    if (o.kept) p += o.probability;
  }
  return p;
}

std::optional<DensityOp> RoundResult::kept_state() const {
  CMatrix acc = CMatrix::Zero(4, 4);
  double weight = 0.0;
  for (const auto& o : outcomes) {
    if (!o.kept || !o.post_state) continue;
    acc += o.probability * o.post_state->matrix();
    weight += o.probability;
  }
  if (weight < kZeroProbability) return std::nullopt;
  return DensityOp(acc / weight);
}

std::optional<double> RoundResult::kept_fidelity() const {
  const auto state = kept_state();
  if (!state) return std::nullopt;
  return fidelity_with(*state, bell_state(BellLabel::PhiPlus));
}

PureRoundResult run_round_pure(BellLabel pair1, BellLabel pair2, const RoundConfig& cfg) {
  cfg.validate();
  const PureState evolved = reflect_and_rotate(photons_and_atoms(pair1, pair2), cfg);
  const PureState phi_plus = bell_state(BellLabel::PhiPlus);

  PureRoundResult result{{}, evolved.norm_squared()};
  for (const BranchKey& key : branch_layout()) {
    PureBranch branch{key.detectors, key.atoms, key.kept(), 0.0, std::nullopt, 0.0};
    PureState s = project(evolved, kP1, basis_vector(static_cast<int>(key.detectors[0])));
    s = project(s, kP2, basis_vector(static_cast<int>(key.detectors[1])));
    if (key.atoms) {
      s = apply_on(s, cfg.atom_hadamard, one(kA2));
      s = apply_on(s, cfg.atom_hadamard, one(kB2));
      s = project(s, kA2, basis_vector((*key.atoms)[0]));
      s = project(s, kB2, basis_vector((*key.atoms)[1]));
      if ((*key.atoms)[0] != (*key.atoms)[1]) s = apply_on(s, gates::pauli_z(), one(kB1));
    }
    branch.probability = s.norm_squared();
    if (branch.kept && branch.probability >= kZeroProbability) {
      PureState post = s.normalized();
      const DensityOp reduced = partial_trace(DensityOp::from_pure(post), kPairOne);
      branch.fidelity = fidelity_with(reduced, phi_plus);
      branch.post_state = std::move(post);
    }
    result.branches.push_back(std::move(branch));
  }
  return result;
}

RoundResult run_round_exact(const BellMixture& pair1, const BellMixture& pair2,
                            const RoundConfig& cfg) {
  pair1.validate();
  pair2.validate();
  cfg.validate();

  const auto& layout = branch_layout();
  std::vector<double> branch_weight(layout.size(), 0.0);
  std::vector<CMatrix> branch_rho(layout.size(), CMatrix::Zero(4, 4));
  double survival = 0.0;

  for (BellLabel l1 : kBellLabels) {
    for (BellLabel l2 : kBellLabels) {
      const double w = pair1.weight(l1) * pair2.weight(l2);
      if (w == 0.0) continue;
      const PureRoundResult pure = run_round_pure(l1, l2, cfg);
      survival += w * pure.photon_survival;
      for (std::size_t b = 0; b < layout.size(); ++b) {
        const PureBranch& br = pure.branches[b];
        branch_weight[b] += w * br.probability;
        if (br.post_state) {
          const DensityOp reduced = partial_trace(DensityOp::from_pure(*br.post_state), kPairOne);
          branch_rho[b] += (w * br.probability) * reduced.matrix();
        }
      }
    }
  }
  if (!(survival > 0.0)) throw ContractError("gate absorbs every photon");

  RoundResult result{{}, survival};
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const BranchKey& key = layout[b];
    RoundOutcome o;
    o.detectors = key.detectors;
    o.atoms = key.atoms;
    o.kept = key.kept();
    o.probability = branch_weight[b] / survival;
    o.correction_applied = key.atoms && (*key.atoms)[0] != (*key.atoms)[1];
    if (o.kept && o.probability >= kZeroProbability) {
      o.post_state = DensityOp(branch_rho[b] / branch_weight[b]);
    }
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

RoundResult run_round_density(const BellMixture& pair1, const BellMixture& pair2,
                              const RoundConfig& cfg) {
  pair1.validate();
  pair2.validate();
  cfg.validate();

  const DensityOp evolved = reflect_and_rotate(photons_and_atoms(pair1, pair2), cfg);
  const double survival = evolved.trace();
  if (!(survival > 0.0)) throw ContractError("gate absorbs every photon");
  const QubitBasis z = computational_basis();

  RoundResult result{{}, survival};
  for (const BranchKey& key : branch_layout()) {
    RoundOutcome o;
    o.detectors = key.detectors;
    o.atoms = key.atoms;
    o.kept = key.kept();
    o.correction_applied = key.atoms && (*key.atoms)[0] != (*key.atoms)[1];

    const auto alice = measure(evolved, kP1, z)[static_cast<std::size_t>(key.detectors[0])];
    o.probability = alice.probability;
    if (!alice.post_state) {
      result.outcomes.push_back(std::move(o));
      continue;
    }
    const auto bob = measure(*alice.post_state, kP2, z)[static_cast<std::size_t>(key.detectors[1])];
    o.probability *= bob.probability;
    if (!key.atoms || !bob.post_state) {
      result.outcomes.push_back(std::move(o));
      continue;
    }

    DensityOp atoms = apply_on(*bob.post_state, cfg.atom_hadamard, one(kA2));
    atoms = apply_on(atoms, cfg.atom_hadamard, one(kB2));
    const auto a2_branches = measure(atoms, kA2, z);
    const auto& ma = a2_branches[static_cast<std::size_t>((*key.atoms)[0])];
    o.probability *= ma.probability;
    if (!ma.post_state) {
      result.outcomes.push_back(std::move(o));
      continue;
    }
    const auto b2_branches = measure(*ma.post_state, kB2, z);
    const auto& mb = b2_branches[static_cast<std::size_t>((*key.atoms)[1])];
    o.probability *= mb.probability;
    if (mb.post_state && o.probability >= kZeroProbability) {
      DensityOp post = *mb.post_state;
      if (o.correction_applied) post = apply_on(post, gates::pauli_z(), one(kB1));
      o.post_state = partial_trace(post, kPairOne);
    }
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

}  // namespace fepp
