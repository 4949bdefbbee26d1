#include "fepp/qstate.hpp"

#include "fepp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <string>

namespace fepp {
namespace {

void check_dimension(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw ContractError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  if (dim > kMaxDimension) {
    throw SizingError("dimension " + std::to_string(dim) + " exceeds cap " +
                      std::to_string(kMaxDimension));
  }
}

void check_finite(const CMatrix& m) {
  if (!m.allFinite()) throw ContractError("non-finite matrix entry");
}

std::size_t log2_dim(std::size_t dim) { return static_cast<std::size_t>(std::countr_zero(dim)); }

void check_targets(std::span<const std::size_t> targets, std::size_t num_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= num_qubits) {
      throw ContractError("target " + std::to_string(targets[i]) + " out of range for " +
                          std::to_string(num_qubits) + " qubits");
    }
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) throw ContractError("repeated target index");
    }
  }
}

// Bit mask of a qubit position in an n-qubit index.
std::size_t bit_of(std::size_t position, std::size_t num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - position);
}

// Local operator index formed from the target bits of a global index.
std::size_t gather(std::size_t global, std::span<const std::size_t> targets, std::size_t n) {
  std::size_t local = 0;
  for (std::size_t t : targets) local = (local << 1) | ((global & bit_of(t, n)) ? 1u : 0u);
  return local;
}

std::size_t scatter(std::size_t base, std::size_t local, std::span<const std::size_t> targets,
                    std::size_t n) {
  std::size_t global = base;
  const std::size_t k = targets.size();
  for (std::size_t i = 0; i < k; ++i) {
    if ((local >> (k - 1 - i)) & 1u) global |= bit_of(targets[i], n);
  }
  return global;
}

std::size_t target_mask(std::span<const std::size_t> targets, std::size_t n) {
  std::size_t mask = 0;
  for (std::size_t t : targets) mask |= bit_of(t, n);
  return mask;
}

// Applies a 2^k x 2^k operator to each column of m on the given targets.
void apply_to_columns(CMatrix& m, const CMatrix& op, std::span<const std::size_t> targets,
                      std::size_t n) {
  const std::size_t dim = static_cast<std::size_t>(m.rows());
  const std::size_t local_dim = static_cast<std::size_t>(op.rows());
  const std::size_t mask = target_mask(targets, n);
  std::vector<std::size_t> idx(local_dim);
  CVector buf(static_cast<Eigen::Index>(local_dim));
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t l = 0; l < local_dim; ++l) idx[l] = scatter(base, l, targets, n);
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      for (std::size_t l = 0; l < local_dim; ++l) {
        buf(static_cast<Eigen::Index>(l)) = m(static_cast<Eigen::Index>(idx[l]), col);
      }
      const CVector out = op * buf;
      for (std::size_t l = 0; l < local_dim; ++l) {
        m(static_cast<Eigen::Index>(idx[l]), col) = out(static_cast<Eigen::Index>(l));
      }
    }
  }
}

void check_permutation(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) throw ContractError("permutation length does not match qubit count");
  check_targets(order, n);
}

// Maps an input basis index to its position after permuting factors.
std::size_t permute_index(std::size_t in, std::span<const std::size_t> order, std::size_t n) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (in & bit_of(order[k], n)) out |= bit_of(k, n);
  }
  return out;
}

void check_basis(const QubitBasis& basis) {
  for (const auto& b : basis) {
    if (b.dim() != 2) throw ContractError("measurement basis vectors must be single-qubit");
  }
  const double n0 = basis[0].norm_squared();
  const double n1 = basis[1].norm_squared();
  const double overlap = std::abs(basis[0].inner(basis[1]));
  if (std::abs(n0 - 1.0) > 1e-12 || std::abs(n1 - 1.0) > 1e-12 || overlap > 1e-12) {
    throw ContractError("measurement basis is not orthonormal");
  }
}

}  // namespace

Cplx make_cplx(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) throw ContractError("non-finite complex value");
  return {re, im};
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ContractError("operator must be square");
  check_dimension(static_cast<std::size_t>(m_.rows()));
  check_finite(m_);
}

Operator Operator::identity(std::size_t dim) {
  check_dimension(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  return Operator(CMatrix::Identity(d, d));
}

Operator Operator::diagonal(std::span<const Cplx> entries) {
  CVector d(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) d(static_cast<Eigen::Index>(i)) = entries[i];
  return Operator(d.asDiagonal().toDenseMatrix());
}

std::size_t Operator::num_qubits() const { return log2_dim(dim()); }

Operator Operator::operator*(const Operator& rhs) const {
  if (dim() != rhs.dim()) throw ContractError("operator dimension mismatch in product");
  return Operator(m_ * rhs.m_);
}

bool Operator::is_unitary(double tol) const {
  const auto d = m_.rows();
  return (m_.adjoint() * m_ - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_diagonal(double tol) const {
  for (Eigen::Index r = 0; r < m_.rows(); ++r) {
    for (Eigen::Index c = 0; c < m_.cols(); ++c) {
      if (r != c && std::abs(m_(r, c)) > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(CVector amplitudes) : v_(std::move(amplitudes)) {
  check_dimension(static_cast<std::size_t>(v_.size()));
  check_finite(v_);
}

PureState PureState::basis(std::size_t num_qubits, std::size_t index) {
  if (num_qubits >= 64) throw SizingError("too many qubits");
  const std::size_t dim = std::size_t{1} << num_qubits;
  check_dimension(dim);
  if (index >= dim) throw ContractError("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::from_amplitudes(std::span<const Cplx> amplitudes) {
  CVector v(static_cast<Eigen::Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) v(static_cast<Eigen::Index>(i)) = amplitudes[i];
  return PureState(std::move(v));
}

std::size_t PureState::num_qubits() const { return log2_dim(dim()); }

PureState PureState::normalized() const {
  const double n = v_.norm();
  if (n == 0.0) throw ContractError("cannot normalize the zero vector");
  return PureState(v_ / n);
}

Cplx PureState::inner(const PureState& other) const {
  if (dim() != other.dim()) throw ContractError("state dimension mismatch in inner product");
  return v_.dot(other.v_);  // Eigen's dot conjugates the left operand
}

// ---------------------------------------------------------------------------
// DensityOp

DensityOp::DensityOp(CMatrix m, double hermitian_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ContractError("density operator must be square");
  check_dimension(static_cast<std::size_t>(m_.rows()));
  check_finite(m_);
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol) {
    throw ContractError("density operator is not Hermitian");
  }
}

DensityOp DensityOp::from_pure(const PureState& psi) {
  const CVector& v = psi.amplitudes();
  return DensityOp(v * v.adjoint());
}

DensityOp DensityOp::maximally_mixed(std::size_t num_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  return DensityOp(CMatrix::Identity(d, d) / static_cast<double>(d));
}

std::size_t DensityOp::num_qubits() const { return log2_dim(dim()); }

double DensityOp::trace() const { return m_.trace().real(); }

DensityOp DensityOp::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw ContractError("cannot normalize a density operator with zero trace");
  return DensityOp(m_ / t);
}

double DensityOp::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityOp::is_valid_state(double tol) const {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(trace() - 1.0) > tol) return false;
  return min_eigenvalue() >= -1e-10;
}

// ---------------------------------------------------------------------------
// Tensor products

namespace {
CMatrix kron_matrix(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (static_cast<std::size_t>(rows) > kMaxDimension ||
      static_cast<std::size_t>(cols) > kMaxDimension) {
    throw SizingError("Kronecker product exceeds dimension cap");
  }
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}
}  // namespace

Operator kron(const Operator& a, const Operator& b) {
  return Operator(kron_matrix(a.matrix(), b.matrix()));
}

PureState kron(const PureState& a, const PureState& b) {
  return PureState(CVector(kron_matrix(a.amplitudes(), b.amplitudes())));
}

DensityOp kron(const DensityOp& a, const DensityOp& b) {
  return DensityOp(kron_matrix(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Operator application

PureState apply_on(const PureState& state, const Operator& op,
                   std::span<const std::size_t> targets) {
  const std::size_t n = state.num_qubits();
  check_targets(targets, n);
  if (op.dim() != (std::size_t{1} << targets.size())) {
    throw ContractError("operator dimension does not match number of targets");
  }
  CMatrix m = state.amplitudes();
  apply_to_columns(m, op.matrix(), targets, n);
  return PureState(CVector(m));
}

DensityOp apply_on(const DensityOp& rho, const Operator& op,
                   std::span<const std::size_t> targets) {
  const std::size_t n = rho.num_qubits();
  check_targets(targets, n);
  if (op.dim() != (std::size_t{1} << targets.size())) {
    throw ContractError("operator dimension does not match number of targets");
  }
  // U rho U^dagger = U (U rho^dagger)^dagger, and rho is Hermitian.
  CMatrix m = rho.matrix();
  apply_to_columns(m, op.matrix(), targets, n);
  CMatrix mt = m.adjoint();
  apply_to_columns(mt, op.matrix(), targets, n);
  CMatrix result = mt.adjoint();
  result = 0.5 * (result + result.adjoint()).eval();
  return DensityOp(std::move(result));
}

Operator embed(const Operator& op, std::span<const std::size_t> targets, std::size_t num_qubits) {
  check_targets(targets, num_qubits);
  if (op.dim() != (std::size_t{1} << targets.size())) {
    throw ContractError("operator dimension does not match number of targets");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  check_dimension(dim);
  const std::size_t mask = target_mask(targets, num_qubits);
  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          op(gather(r, targets, num_qubits), gather(c, targets, num_qubits));
    }
  }
  return Operator(std::move(full));
}

PureState permute_qubits(const PureState& state, std::span<const std::size_t> order) {
  const std::size_t n = state.num_qubits();
  check_permutation(order, n);
  CVector out(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t i = 0; i < state.dim(); ++i) {
    out(static_cast<Eigen::Index>(permute_index(i, order, n))) = state[i];
  }
  return PureState(std::move(out));
}

DensityOp permute_qubits(const DensityOp& rho, std::span<const std::size_t> order) {
  const std::size_t n = rho.num_qubits();
  check_permutation(order, n);
  const std::size_t dim = rho.dim();
  std::vector<std::size_t> map(dim);
  for (std::size_t i = 0; i < dim; ++i) map[i] = permute_index(i, order, n);
  CMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      out(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c])) = rho(r, c);
    }
  }
  return DensityOp(std::move(out));
}

DensityOp partial_trace(const DensityOp& rho, std::span<const std::size_t> keep) {
  if (keep.empty()) throw ContractError("partial_trace needs at least one kept subsystem");
  const std::size_t n = rho.num_qubits();
  check_targets(keep, n);
  const std::size_t keep_mask = target_mask(keep, n);
  const std::size_t out_dim = std::size_t{1} << keep.size();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
  // Sum over indices whose traced-out bits agree between row and column.
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      if ((r & ~keep_mask) != (c & ~keep_mask)) continue;
      out(static_cast<Eigen::Index>(gather(r, keep, n)), static_cast<Eigen::Index>(gather(c, keep, n))) +=
          rho(r, c);
    }
  }
  return DensityOp(std::move(out));
}

// ---------------------------------------------------------------------------
// Measurement

QubitBasis computational_basis() { return {PureState::basis(1, 0), PureState::basis(1, 1)}; }

PureState project(const PureState& psi, std::size_t target, const PureState& basis_vector) {
  if (basis_vector.dim() != 2) throw ContractError("projection vector must be single-qubit");
  const CVector& b = basis_vector.amplitudes();
  const Operator proj(b * b.adjoint());
  const std::array<std::size_t, 1> t{target};
  return apply_on(psi, proj, t);
}

std::vector<MeasurementBranch<PureState>> measure(const PureState& psi, std::size_t target,
                                                  const QubitBasis& basis) {
  check_basis(basis);
  const double total = psi.norm_squared();
  if (!(total > 0.0)) throw ContractError("cannot measure the zero vector");
  std::vector<MeasurementBranch<PureState>> out;
  for (int k = 0; k < 2; ++k) {
    PureState projected = project(psi, target, basis[static_cast<std::size_t>(k)]);
    const double p = projected.norm_squared() / total;
    MeasurementBranch<PureState> branch{k, p, std::nullopt};
    if (p >= kZeroProbability) branch.post_state = projected.normalized();
    out.push_back(std::move(branch));
  }
  return out;
}

std::vector<MeasurementBranch<DensityOp>> measure(const DensityOp& rho, std::size_t target,
                                                  const QubitBasis& basis) {
  check_basis(basis);
  const double total = rho.trace();
  if (!(total > 0.0)) throw ContractError("cannot measure a zero-trace operator");
  std::vector<MeasurementBranch<DensityOp>> out;
  const std::array<std::size_t, 1> t{target};
  for (int k = 0; k < 2; ++k) {
    const CVector& b = basis[static_cast<std::size_t>(k)].amplitudes();
    const Operator proj(b * b.adjoint());
    DensityOp projected = apply_on(rho, proj, t);
    const double p = projected.trace() / total;
    MeasurementBranch<DensityOp> branch{k, p, std::nullopt};
    if (p >= kZeroProbability) branch.post_state = projected.normalized();
    out.push_back(std::move(branch));
  }
  return out;
}

double fidelity_with(const DensityOp& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw ContractError("fidelity dimension mismatch");
  const CVector& v = psi.amplitudes();
  const Cplx f = v.dot(rho.matrix() * v);
  return f.real();
}

namespace gates {
Operator pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return Operator(m);
}
Operator pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, Cplx(0, -1), Cplx(0, 1), 0.0;
  return Operator(m);
}
Operator pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return Operator(m);
}
Operator hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix m(2, 2);
  m << s, s, s, -s;
  return Operator(m);
}
}  // namespace gates

}  // namespace fepp
