#pragma once

// Dense multi-qubit state machinery.
//
// Ordering convention: factor 0 is the most significant bit of a basis
// index, so |b0 b1 ... b_{n-1}> has index sum_k b_k 2^{n-1-k}. Every
// operator that acts on a list of targets uses targets[0] as the most
// significant bit of its own local index.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fepp {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Largest dimension any state or operator may reach.
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 12;

// Branches whose probability falls below this are reported without a state.
inline constexpr double kZeroProbability = 1e-14;

// Builds a complex number, rejecting NaN and infinite components.
Cplx make_cplx(double re, double im = 0.0);

// Square operator on a 2^n-dimensional space.
class Operator {
 public:
  explicit Operator(CMatrix m);

  static Operator identity(std::size_t dim);
  static Operator diagonal(std::span<const Cplx> entries);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const;
  const CMatrix& matrix() const { return m_; }
  Cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  Operator operator*(const Operator& rhs) const;

  bool is_unitary(double tol = 1e-12) const;
  bool is_diagonal(double tol = 0.0) const;

 private:
  CMatrix m_;
};

class PureState {
 public:
  explicit PureState(CVector amplitudes);

  // Computational basis state |index> on num_qubits qubits.
  static PureState basis(std::size_t num_qubits, std::size_t index);
  static PureState from_amplitudes(std::span<const Cplx> amplitudes);

  std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
  std::size_t num_qubits() const;
  const CVector& amplitudes() const { return v_; }
  Cplx operator[](std::size_t i) const { return v_(static_cast<Eigen::Index>(i)); }

  double norm_squared() const { return v_.squaredNorm(); }
  // Scales to unit norm; throws ContractError on the zero vector.
  PureState normalized() const;
  Cplx inner(const PureState& other) const;  // <this|other>

 private:
  CVector v_;
};

// Hermitian operator representing a (possibly unnormalized) mixed state.
class DensityOp {
 public:
  // Throws ContractError if the matrix is not square or not Hermitian.
  explicit DensityOp(CMatrix m, double hermitian_tol = 1e-12);

  static DensityOp from_pure(const PureState& psi);
  static DensityOp maximally_mixed(std::size_t num_qubits);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const;
  const CMatrix& matrix() const { return m_; }
  Cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  double trace() const;
  DensityOp normalized() const;

  // Smallest eigenvalue (Hermitian eigen-decomposition).
  double min_eigenvalue() const;
  // Hermitian, unit trace and eigenvalues >= -1e-10.
  bool is_valid_state(double tol = 1e-12) const;

 private:
  CMatrix m_;
};

Operator kron(const Operator& a, const Operator& b);
PureState kron(const PureState& a, const PureState& b);
DensityOp kron(const DensityOp& a, const DensityOp& b);

// Embeds op on the given target qubits (identity elsewhere) and applies it.
// Density operators are conjugated: rho -> U rho U^dagger.
PureState apply_on(const PureState& state, const Operator& op,
                   std::span<const std::size_t> targets);
DensityOp apply_on(const DensityOp& rho, const Operator& op,
                   std::span<const std::size_t> targets);

// Full-space matrix of op acting on targets of an n-qubit register.
Operator embed(const Operator& op, std::span<const std::size_t> targets,
               std::size_t num_qubits);

// Reorders tensor factors: output factor k is input factor order[k].
PureState permute_qubits(const PureState& state, std::span<const std::size_t> order);
DensityOp permute_qubits(const DensityOp& rho, std::span<const std::size_t> order);

// Reduced state on `keep`, with output factors in the order given.
DensityOp partial_trace(const DensityOp& rho, std::span<const std::size_t> keep);

using QubitBasis = std::array<PureState, 2>;
QubitBasis computational_basis();

template <typename State>
struct MeasurementBranch {
  int outcome;         // index into the measurement basis
  double probability;  // relative to the input norm/trace
  // Renormalized post-measurement state; empty when probability < kZeroProbability.
  std::optional<State> post_state;
};

// Projective measurement of one qubit in an orthonormal basis.
std::vector<MeasurementBranch<DensityOp>> measure(const DensityOp& rho, std::size_t target,
                                                  const QubitBasis& basis);
std::vector<MeasurementBranch<PureState>> measure(const PureState& psi, std::size_t target,
                                                  const QubitBasis& basis);

// Unnormalized projection (|b><b| on target) without renormalization.
PureState project(const PureState& psi, std::size_t target, const PureState& basis_vector);

// <psi|rho|psi>.
double fidelity_with(const DensityOp& rho, const PureState& psi);

namespace gates {
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator hadamard();
}  // namespace gates

}  // namespace fepp
