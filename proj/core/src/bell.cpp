#include "fepp/errors.hpp"
#include "fepp/protocol.hpp"

#include <cmath>

namespace fepp {

PureState bell_state(BellLabel label) {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<Cplx, 4> amp{};
  switch (label) {
    case BellLabel::PhiPlus:  amp = {s, 0.0, 0.0, s}; break;
    case BellLabel::PhiMinus: amp = {s, 0.0, 0.0, -s}; break;
    case BellLabel::PsiPlus:  amp = {0.0, s, s, 0.0}; break;
    case BellLabel::PsiMinus: amp = {0.0, s, -s, 0.0}; break;
  }
  return PureState::from_amplitudes(amp);
}

std::string to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiMinus: return "psi-";
  }
  return "?";
}

BellMixture BellMixture::bit_flip(double fidelity) { return {fidelity, 1.0 - fidelity, 0.0, 0.0}; }

BellMixture BellMixture::phase_flip(double fidelity) { return {fidelity, 0.0, 1.0 - fidelity, 0.0}; }

void BellMixture::validate() const {
  double sum = 0.0;
  for (double w : weights()) {
    if (!std::isfinite(w)) throw ContractError("Bell weights must be finite");
    if (w < 0.0) throw ContractError("Bell weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ContractError("Bell weights must sum to 1");
}

DensityOp bell_mixture_to_density(const BellMixture& m) {
  m.validate();
  CMatrix rho = CMatrix::Zero(4, 4);
  for (BellLabel label : kBellLabels) {
    const CVector v = bell_state(label).amplitudes();
    rho += m.weight(label) * (v * v.adjoint());
  }
  return DensityOp(std::move(rho));
}

BellMixture convert_phase_to_bit(const BellMixture& m) {
  return {m.p_phi_plus, m.p_phi_minus, m.p_psi_plus, m.p_psi_minus};
}

}  // namespace fepp
