#include "fepp/faraday.hpp"

#include "fepp/errors.hpp"

#include <cmath>
#include <numbers>

namespace fepp {

CavityParams CavityParams::ideal() {
  CavityParams p;
  p.kappa = 1.0;
  p.omega_c = 0.0;
  p.omega_0 = 0.0;
  p.omega_p = p.omega_c - p.kappa / 2.0;
  p.lambda = p.kappa / 2.0;
  p.gamma = 0.0;
  return p;
}

void CavityParams::validate() const {
  for (double v : {omega_c, omega_0, omega_p, kappa, gamma, lambda}) {
    if (!std::isfinite(v)) throw ContractError("cavity parameters must be finite");
  }
  if (!(kappa > 0.0)) throw ContractError("kappa must be positive");
  if (gamma < 0.0) throw ContractError("gamma must be non-negative");
  if (lambda < 0.0) throw ContractError("lambda must be non-negative");
}

double principal_arg(Cplx z) {
  const double a = std::arg(z);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

Cplx reflection(const CavityParams& params) {
  params.validate();
  const Cplx i{0.0, 1.0};
  const Cplx cavity_detuning = i * (params.omega_c - params.omega_p);
  const Cplx atom_term = i * (params.omega_0 - params.omega_p) + params.gamma / 2.0;
  const double g2 = params.lambda * params.lambda;
  const Cplx num = (cavity_detuning - params.kappa / 2.0) * atom_term + g2;
  const Cplx den = (cavity_detuning + params.kappa / 2.0) * atom_term + g2;
  if (std::abs(den) < 1e-300) {
    throw SingularParameterError("reflection coefficient denominator vanishes");
  }
  return num / den;
}

Cplx empty_reflection(const CavityParams& params) {
  params.validate();
  const Cplx cavity_detuning{0.0, params.omega_c - params.omega_p};
  return (cavity_detuning - params.kappa / 2.0) / (cavity_detuning + params.kappa / 2.0);
}

FaradayPhases phases(const CavityParams& params) {
  const Cplx r = reflection(params);
  const Cplx r0 = empty_reflection(params);
  return {principal_arg(r), principal_arg(r0), std::abs(r), std::abs(r0)};
}

// ---------------------------------------------------------------------------

PhotonAtomGate::PhotonAtomGate(std::vector<Cplx> diagonal) : diag_(std::move(diagonal)) {
  if (diag_.size() != 4 && diag_.size() != 8) {
    throw ContractError("photon-atom gate must have dimension 4 or 8");
  }
  for (const Cplx& c : diag_) make_cplx(c.real(), c.imag());
}

PhotonAtomGate PhotonAtomGate::from_operator(const Operator& op) {
  if (!op.is_diagonal()) throw ContractError("photon-atom gate must be diagonal");
  std::vector<Cplx> d(op.dim());
  for (std::size_t k = 0; k < op.dim(); ++k) d[k] = op(k, k);
  return PhotonAtomGate(std::move(d));
}

bool PhotonAtomGate::is_unitary(double tol) const {
  for (const Cplx& c : diag_) {
    if (std::abs(std::abs(c) - 1.0) > tol) return false;
  }
  return true;
}

Operator PhotonAtomGate::to_operator() const { return Operator::diagonal(diag_); }

PhotonAtomGate single_cavity_gate(const CavityParams& params) {
  const Cplx r = reflection(params);
  const Cplx r0 = empty_reflection(params);
  return PhotonAtomGate({r, r0, r0, r});
}

PhotonAtomGate ideal_gate() {
  const Cplx i{0.0, 1.0};
  return PhotonAtomGate({Cplx{-1.0, 0.0}, i, i, Cplx{-1.0, 0.0}});
}

PhotonAtomGate two_cavity_gate(const PhotonAtomGate& first, const PhotonAtomGate& second) {
  if (first.dim() != 4 || second.dim() != 4) {
    throw ContractError("two_cavity_gate composes two single-atom gates");
  }
  // Index (photon, atom1, atom2) -> first[photon, atom1] * second[photon, atom2].
  std::vector<Cplx> d(8);
  for (std::size_t photon = 0; photon < 2; ++photon) {
    for (std::size_t a1 = 0; a1 < 2; ++a1) {
      for (std::size_t a2 = 0; a2 < 2; ++a2) {
        d[4 * photon + 2 * a1 + a2] = first.entry(2 * photon + a1) * second.entry(2 * photon + a2);
      }
    }
  }
  return PhotonAtomGate(std::move(d));
}

ParityReport parity_action_check(const PhotonAtomGate& gate, double tol) {
  if (gate.dim() != 8) throw ContractError("parity check needs a two-atom gate");
  const double s = 1.0 / std::sqrt(2.0);
  ParityReport report{};
  report.passed = true;
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      const std::size_t atoms = static_cast<std::size_t>(2 * a1 + a2);
      const Cplx out_l = s * gate.entry(atoms);
      const Cplx out_r = s * gate.entry(4 + atoms);
      const double norm = std::sqrt(std::norm(out_l) + std::norm(out_r));

      ParityCaseReport c{};
      c.atoms = {a1, a2};
      c.even_parity = (a1 == a2);
      c.expect_flip = c.even_parity;
      c.output_norm = norm;
      if (norm == 0.0) {
        c.global_phase = 0.0;
        c.overlap = 0.0;
        c.residual = 1.0;
        c.passed = false;
      } else {
        const double sign = c.expect_flip ? -1.0 : 1.0;
        const Cplx amp = (s * out_l + sign * s * out_r) / norm;
        c.overlap = std::abs(amp);
        c.global_phase = c.overlap > 0.0 ? amp / c.overlap : Cplx{0.0, 0.0};
        const Cplx dl = out_l / norm - c.global_phase * s;
        const Cplx dr = out_r / norm - c.global_phase * (sign * s);
        c.residual = std::sqrt(std::norm(dl) + std::norm(dr));
        c.passed = c.residual <= tol;
      }
      report.passed = report.passed && c.passed;
      report.cases[atoms] = c;
    }
  }
  return report;
}

}  // namespace fepp
