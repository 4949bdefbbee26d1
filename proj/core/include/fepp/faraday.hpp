#pragma once

// Reflection of a single photon off a low-Q cavity holding one
// three-level atom, and the photon-atom phase gates built from it.
//
// Frequencies and rates are dimensionless, in units of the cavity damping
// rate. Atom |0> = |g_L> couples to L-polarized light, |1> = |g_R> to R.

#include "fepp/qstate.hpp"

#include <array>
#include <vector>

namespace fepp {

struct CavityParams {
  double omega_c = 0.0;  // cavity frequency
  double omega_0 = 0.0;  // atomic transition frequency
  double omega_p = -0.5; // probe photon frequency
  double kappa = 1.0;    // cavity damping rate
  double gamma = 0.0;    // atomic damping rate
  double lambda = 0.5;   // atom-cavity coupling

  // omega_0 = omega_c, omega_p = omega_c - kappa/2, lambda = kappa/2, gamma = 0.
  static CavityParams ideal();

  // Throws ContractError unless kappa > 0, gamma >= 0, lambda >= 0, all finite.
  void validate() const;
};

struct FaradayPhases {
  double theta;    // arg r, in (-pi, pi]
  double theta_0;  // arg r0, in (-pi, pi]
  double mag_r;
  double mag_r0;

  double rotation() const { return theta - theta_0; }
};

// Atom-coupled cavity reflection coefficient r(omega_p).
Cplx reflection(const CavityParams& params);
// Empty-cavity reflection r0(omega_p); a pure phase.
Cplx empty_reflection(const CavityParams& params);
FaradayPhases phases(const CavityParams& params);

// arg(z) mapped into (-pi, pi], so that -1 - 0i reports +pi.
double principal_arg(Cplx z);

// Diagonal operator on photon (x) atom, or photon (x) atom (x) atom.
// Basis order is lexicographic with the photon first: L=0, R=1.
class PhotonAtomGate {
 public:
  // Throws ContractError unless the diagonal has 4 or 8 entries.
  explicit PhotonAtomGate(std::vector<Cplx> diagonal);
  // Throws ContractError if op is not diagonal.
  static PhotonAtomGate from_operator(const Operator& op);

  std::size_t dim() const { return diag_.size(); }
  std::size_t num_atoms() const { return dim() == 4 ? 1 : 2; }
  const std::vector<Cplx>& diagonal() const { return diag_; }
  Cplx entry(std::size_t i) const { return diag_.at(i); }

  bool is_unitary(double tol = 1e-12) const;
  Operator to_operator() const;

 private:
  std::vector<Cplx> diag_;
};

// diag(r, r0, r0, r) on {|L0>, |L1>, |R0>, |R1>}.
PhotonAtomGate single_cavity_gate(const CavityParams& params);
// Exact diag(-1, i, i, -1).
PhotonAtomGate ideal_gate();
// Photon reflects off cavity 1 (atom 1), then cavity 2 (atom 2).
PhotonAtomGate two_cavity_gate(const PhotonAtomGate& first, const PhotonAtomGate& second);

struct ParityCaseReport {
  std::array<int, 2> atoms;
  bool even_parity;
  bool expect_flip;     // even parity should map (L+R)/sqrt2 to (L-R)/sqrt2
  Cplx global_phase;    // <expected|out> / |<expected|out>|
  double overlap;       // |<expected|out>| after normalizing out
  double residual;      // || out/|out| - global_phase * expected ||
  double output_norm;   // norm of the unnormalized output photon state
  bool passed;
};

struct ParityReport {
  std::array<ParityCaseReport, 4> cases;
  bool passed;
};

// Checks the composite gate acts as a photon-readable parity check of the
// two atoms: flip on even parity, identity on odd, up to global phases.
ParityReport parity_action_check(const PhotonAtomGate& gate, double tol = 1e-12);

}  // namespace fepp
