#include "fepp/errors.hpp"
#include "fepp/qstate.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

using namespace fepp;
using fepp::testing::max_abs_diff;

namespace {

const Cplx kI{0.0, 1.0};

PureState ket(std::initializer_list<Cplx> amps) {
  std::vector<Cplx> v(amps);
  return PureState::from_amplitudes(v);
}

PureState phi_plus() {
  const double s = 1.0 / std::sqrt(2.0);
  return ket({s, 0.0, 0.0, s});
}

PureState psi_plus() {
  const double s = 1.0 / std::sqrt(2.0);
  return ket({0.0, s, s, 0.0});
}

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
  const Operator id4 = kron(Operator::identity(2), Operator::identity(2));
  EXPECT_EQ(max_abs_diff(id4.matrix(), CMatrix::Identity(4, 4)), 0.0);
}

TEST(Kron, BasisKets) {
  const PureState s = kron(PureState::basis(1, 0), PureState::basis(1, 1));
  ASSERT_EQ(s.dim(), 4u);
  EXPECT_EQ(s[0], Cplx(0.0));
  EXPECT_EQ(s[1], Cplx(1.0));
  EXPECT_EQ(s[2], Cplx(0.0));
  EXPECT_EQ(s[3], Cplx(0.0));
}

TEST(Kron, LeftFactorIsMostSignificant) {
  const std::array<Cplx, 2> d{Cplx(-1.0), kI};
  const Operator out = kron(Operator::diagonal(d), Operator::identity(2));
  // Expanded by hand: diag(-1, -1, i, i).
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = -1.0;
  expected(1, 1) = -1.0;
  expected(2, 2) = kI;
  expected(3, 3) = kI;
  EXPECT_EQ(max_abs_diff(out.matrix(), expected), 0.0);
}

TEST(Kron, DimensionCapRaisesSizingError) {
  const Operator big = Operator::identity(std::size_t{1} << 7);
  EXPECT_THROW(kron(big, big), SizingError);
}

TEST(Construction, RejectsNonFiniteAndBadDimensions) {
  EXPECT_THROW(make_cplx(std::numeric_limits<double>::quiet_NaN(), 0.0), ContractError);
  EXPECT_THROW(make_cplx(0.0, std::numeric_limits<double>::infinity()), ContractError);
  EXPECT_THROW(PureState(CVector::Zero(3)), ContractError);
  EXPECT_THROW(Operator(CMatrix::Zero(2, 4)), ContractError);
  CMatrix not_hermitian = CMatrix::Zero(2, 2);
  not_hermitian(0, 1) = 1.0;
  EXPECT_THROW(DensityOp{not_hermitian}, ContractError);
}

TEST(ApplyOn, BitFlipOnSecondQubit) {
  const std::array<std::size_t, 1> t{1};
  const PureState out = apply_on(PureState::basis(2, 0), gates::pauli_x(), t);
  EXPECT_EQ(out[1], Cplx(1.0));
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-15);
}

TEST(ApplyOn, IdealGateOnPhotonAndAtomOfLargerRegister) {
  // |L>|L>|0>|0> with the (photon, atom) gate on factors 0 and 2 picks up -1.
  const std::array<Cplx, 4> d{Cplx(-1.0), kI, kI, Cplx(-1.0)};
  const std::array<std::size_t, 2> t{0, 2};
  const PureState out = apply_on(PureState::basis(4, 0), Operator::diagonal(d), t);
  EXPECT_EQ(out[0], Cplx(-1.0));
}

TEST(ApplyOn, DensityConjugation) {
  const double s = 1.0 / std::sqrt(2.0);
  const DensityOp plus = DensityOp::from_pure(ket({s, s}));
  const std::array<std::size_t, 1> t{0};
  const DensityOp out = apply_on(plus, gates::pauli_z(), t);
  const DensityOp minus = DensityOp::from_pure(ket({s, -s}));
  EXPECT_LT(max_abs_diff(out.matrix(), minus.matrix()), 1e-15);
}

TEST(ApplyOn, Errors) {
  const std::array<std::size_t, 2> repeated{1, 1};
  const std::array<std::size_t, 1> one{0};
  const std::array<std::size_t, 1> out_of_range{3};
  const PureState s = PureState::basis(2, 0);
  EXPECT_THROW(apply_on(s, Operator::identity(4), repeated), ContractError);
  EXPECT_THROW(apply_on(s, Operator::identity(4), one), ContractError);
  EXPECT_THROW(apply_on(s, gates::pauli_x(), out_of_range), ContractError);
}

TEST(ApplyOn, RandomUnitaryPreservesTraceAndHermiticity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityOp rho = fepp::testing::random_density(rng, 16);
    const Operator u = fepp::testing::random_unitary(rng, 4);
    std::array<std::size_t, 2> t{static_cast<std::size_t>(trial % 4), static_cast<std::size_t>((trial + 1 + trial / 4) % 4)};
    if (t[0] == t[1]) t[1] = (t[1] + 1) % 4;
    const DensityOp out = apply_on(rho, u, t);
    EXPECT_NEAR(out.trace(), 1.0, 1e-12);
    EXPECT_LT(max_abs_diff(out.matrix(), out.matrix().adjoint()), 1e-12);
    EXPECT_TRUE(out.is_valid_state());
  }
}

// Reference embedding built from kron and an explicit permutation matrix,
// independent of the index gathering used by apply_on and embed.
TEST(ApplyOn, PermutedTargetsMatchExplicitPermutation) {
  std::mt19937_64 rng(11);
  const std::size_t n = 3;
  const std::array<std::array<std::size_t, 2>, 4> target_sets{{{2, 0}, {1, 0}, {0, 2}, {2, 1}}};
  for (const auto& t : target_sets) {
    const Operator u = fepp::testing::random_unitary(rng, 4);
    std::size_t spectator = 0;
    while (spectator == t[0] || spectator == t[1]) ++spectator;
    // Order (t0, t1, spectator) as positions 0, 1, 2 of the reordered register.
    const std::array<std::size_t, 3> order{t[0], t[1], spectator};
    CMatrix perm = CMatrix::Zero(8, 8);
    for (std::size_t in = 0; in < 8; ++in) {
      std::size_t out = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t bit = (in >> (n - 1 - order[k])) & 1u;
        out |= bit << (n - 1 - k);
      }
      perm(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)) = 1.0;
    }
    const CMatrix reordered = kron(u, Operator::identity(2)).matrix();
    const CMatrix reference = perm.transpose() * reordered * perm;

    EXPECT_LT(max_abs_diff(embed(u, t, n).matrix(), reference), 1e-14);

    const DensityOp rho = fepp::testing::random_density(rng, 8);
    const DensityOp out = apply_on(rho, u, t);
    EXPECT_LT(max_abs_diff(out.matrix(), reference * rho.matrix() * reference.adjoint()), 1e-12);

    const PureState psi = PureState(fepp::testing::random_gaussian(rng, 8, 1).col(0)).normalized();
    const PureState psi_out = apply_on(psi, u, t);
    EXPECT_LT(max_abs_diff(psi_out.amplitudes(), reference * psi.amplitudes()), 1e-12);
  }
}

TEST(PartialTrace, ProductState) {
  const std::array<std::size_t, 1> keep{0};
  const DensityOp out = partial_trace(DensityOp::from_pure(PureState::basis(2, 0)), keep);
  EXPECT_LT(max_abs_diff(out.matrix(), DensityOp::from_pure(PureState::basis(1, 0)).matrix()), 1e-15);
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  const std::array<std::size_t, 1> keep{0};
  const DensityOp out = partial_trace(DensityOp::from_pure(phi_plus()), keep);
  EXPECT_LT(max_abs_diff(out.matrix(), CMatrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, RecoversFactorsOfRandomProducts) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOp rho = fepp::testing::random_density(rng, 4);
    const DensityOp sigma = fepp::testing::random_density(rng, 4);
    const DensityOp joint = kron(rho, sigma);

    const std::array<std::size_t, 2> first{0, 1};
    EXPECT_LT(max_abs_diff(partial_trace(joint, first).matrix(), rho.matrix()), 1e-12);
    const std::array<std::size_t, 2> second{2, 3};
    EXPECT_LT(max_abs_diff(partial_trace(joint, second).matrix(), sigma.matrix()), 1e-12);

    // Direct computation: (Tr_B X)_{ij} = sum_k X_{ik,jk}.
    CMatrix direct = CMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) direct(i, j) += joint(4 * i + k, 4 * j + k);
      }
    }
    EXPECT_LT(max_abs_diff(partial_trace(joint, first).matrix(), direct), 1e-12);
    EXPECT_NEAR(partial_trace(joint, first).trace(), joint.trace(), 1e-12);
  }
}

TEST(PartialTrace, KeepOrderReordersFactors) {
  const std::array<std::size_t, 2> swapped{1, 0};
  const DensityOp out = partial_trace(DensityOp::from_pure(PureState::basis(2, 1)), swapped);
  EXPECT_NEAR(out(2, 2).real(), 1.0, 1e-15);
}

TEST(PartialTrace, EmptyKeepIsContractError) {
  EXPECT_THROW(partial_trace(DensityOp::from_pure(phi_plus()), std::span<const std::size_t>{}),
               ContractError);
}

TEST(Measure, DeterministicOutcomeFlagsZeroBranch) {
  const auto branches = measure(DensityOp::from_pure(PureState::basis(1, 0)), 0, computational_basis());
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_EQ(branches[0].probability, 1.0);
  ASSERT_TRUE(branches[0].post_state.has_value());
  EXPECT_NEAR((*branches[0].post_state)(0, 0).real(), 1.0, 1e-15);
  EXPECT_EQ(branches[1].probability, 0.0);
  EXPECT_FALSE(branches[1].post_state.has_value());
}

TEST(Measure, PlusStateIsUnbiased) {
  const double s = 1.0 / std::sqrt(2.0);
  const auto branches = measure(DensityOp::from_pure(ket({s, s})), 0, computational_basis());
  EXPECT_NEAR(branches[0].probability, 0.5, 1e-15);
  EXPECT_NEAR(branches[1].probability, 0.5, 1e-15);
}

TEST(Measure, BitFlipMixtureFirstAtom) {
  const CMatrix rho = 0.8 * DensityOp::from_pure(phi_plus()).matrix() +
                      0.2 * DensityOp::from_pure(psi_plus()).matrix();
  const auto branches = measure(DensityOp(rho), 0, computational_basis());
  EXPECT_NEAR(branches[0].probability, 0.5, 1e-12);
  EXPECT_NEAR(branches[1].probability, 0.5, 1e-12);
  for (const auto& b : branches) {
    ASSERT_TRUE(b.post_state);
    EXPECT_TRUE(b.post_state->is_valid_state());
  }
}

TEST(Measure, RandomStatesInRandomBases) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOp rho = fepp::testing::random_density(rng, 8);
    const Operator u = fepp::testing::random_unitary(rng, 2);
    const QubitBasis basis{PureState(CVector(u.matrix().col(0))), PureState(CVector(u.matrix().col(1)))};
    const auto branches = measure(rho, static_cast<std::size_t>(trial % 3), basis);
    EXPECT_NEAR(branches[0].probability + branches[1].probability, 1.0, 1e-12);
    for (const auto& b : branches) {
      ASSERT_TRUE(b.post_state);
      EXPECT_NEAR(b.post_state->trace(), 1.0, 1e-12);
    }
  }
}

TEST(Measure, NonOrthonormalBasisIsContractError) {
  const double s = 1.0 / std::sqrt(2.0);
  const QubitBasis bad{PureState::basis(1, 0), ket({s, s})};
  EXPECT_THROW(measure(DensityOp::from_pure(PureState::basis(1, 0)), 0, bad), ContractError);
}

TEST(Measure, PureAndDensityAgree) {
  std::mt19937_64 rng(9);
  const PureState psi = PureState(fepp::testing::random_gaussian(rng, 8, 1).col(0)).normalized();
  const auto pure = measure(psi, 1, computational_basis());
  const auto mixed = measure(DensityOp::from_pure(psi), 1, computational_basis());
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(pure[k].probability, mixed[k].probability, 1e-12);
    EXPECT_LT(max_abs_diff(DensityOp::from_pure(*pure[k].post_state).matrix(), mixed[k].post_state->matrix()),
              1e-12);
  }
}

TEST(Fidelity, Examples) {
  EXPECT_NEAR(fidelity_with(DensityOp::from_pure(phi_plus()), phi_plus()), 1.0, 1e-15);
  const CMatrix rho = 0.8 * DensityOp::from_pure(phi_plus()).matrix() +
                      0.2 * DensityOp::from_pure(psi_plus()).matrix();
  EXPECT_NEAR(fidelity_with(DensityOp(rho), phi_plus()), 0.8, 1e-15);
  EXPECT_NEAR(fidelity_with(DensityOp::maximally_mixed(2), phi_plus()), 0.25, 1e-15);
  EXPECT_THROW(fidelity_with(DensityOp::maximally_mixed(1), phi_plus()), ContractError);
}

TEST(PermuteQubits, RoundTripsThroughInverse) {
  std::mt19937_64 rng(13);
  const PureState psi = PureState(fepp::testing::random_gaussian(rng, 16, 1).col(0)).normalized();
  const std::array<std::size_t, 4> order{2, 0, 3, 1};
  std::array<std::size_t, 4> inverse{};
  for (std::size_t k = 0; k < 4; ++k) inverse[order[k]] = k;
  const PureState back = permute_qubits(permute_qubits(psi, order), inverse);
  EXPECT_LT(max_abs_diff(back.amplitudes(), psi.amplitudes()), 1e-15);

  const DensityOp rho = DensityOp::from_pure(psi);
  EXPECT_LT(max_abs_diff(permute_qubits(rho, order).matrix(),
                         DensityOp::from_pure(permute_qubits(psi, order)).matrix()),
            1e-15);
}
