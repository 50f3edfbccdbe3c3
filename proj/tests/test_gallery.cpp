#include <gtest/gtest.h>

#include "test_support.hpp"

namespace wshift {
namespace {

TEST(EigenGrid, DefaultGridValues) {
  const EigenGrid g = default_grid(2);
  EXPECT_EQ(g.lo, -6);
  EXPECT_EQ(g.hi, 6);
  // x_{n,i} = 2 + 0.1 (10 (n + 6) + i)
  EXPECT_NEAR(g.x(-6, 1), 2.1, 1e-14);
  EXPECT_NEAR(g.x(0, 2), 8.2, 1e-14);
  EXPECT_NEAR(g.x(6, 2), 14.2, 1e-14);
  EXPECT_DOUBLE_EQ(g.x(7, 1), 1.0);
  EXPECT_NO_THROW(g.validate());
}

TEST(EigenGrid, Validation) {
  EXPECT_ERROR_KIND(default_grid(1).validate(), ErrorKind::InvalidK);
  EXPECT_ERROR_KIND(default_grid(3, 0, 2).validate(), ErrorKind::GridTooShort);
  EigenGrid g = default_grid(2);
  g.values[3][1] = g.values[5][0];
  EXPECT_ERROR_KIND(g.validate(), ErrorKind::DistinctnessViolated);
  g = default_grid(2);
  g.values[0][0] = -1.0;
  EXPECT_ERROR_KIND(g.validate(), ErrorKind::NotExampleShape);
}

TEST(KDiagonalPair, WeightsFollowGridLayout) {
  for (int k : {2, 3, 4}) {
    const EigenGrid g = default_grid(k);
    const ShiftPair pair = generate_k_diagonal_pair(g);
    for (int n = -10; n <= 12; ++n) {
      for (int j = 1; j <= k; ++j) {
        EXPECT_NEAR(pair.s.at(n)(j - 1, j - 1).real(), g.x(n, j), 1e-15);
        EXPECT_NEAR(pair.t.at(n)(j - 1, j - 1).real(), g.x(n - j, j), 1e-15);
      }
      EXPECT_LT((pair.t.at(n) - CMatrix(pair.t.at(n).diagonal().asDiagonal())).norm(), 1e-15);
    }
  }
  EXPECT_ERROR_KIND(generate_k_diagonal_pair(default_grid(1)), ErrorKind::InvalidK);
}

TEST(KDiagonalPair, KTwoWeightsByHand) {
  const ShiftPair pair = generate_k_diagonal_pair(default_grid(2));
  EXPECT_LT((pair.s.at(0) - diag({8.1, 8.2})).norm(), 1e-13);
  // T_0 = diag(x_{-1,1}, x_{-2,2})
  EXPECT_LT((pair.t.at(0) - diag({7.1, 6.2})).norm(), 1e-13);
}

TEST(CanonicalU0, BlocksAreProjections) {
  const ColumnIsometry u2 = canonical_u0(2);
  ASSERT_EQ(u2.support().size(), 2u);
  EXPECT_EQ(u2.support()[0].row, 1);
  EXPECT_EQ(u2.support()[1].row, 2);
  EXPECT_LT((u2.support()[0].block - diag({1.0, 0.0})).norm(), 1e-15);
  EXPECT_LT((u2.support()[1].block - diag({0.0, 1.0})).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(u2.isometry_defect(), 0.0);
  EXPECT_EQ(canonical_u0(4).support().size(), 4u);
  EXPECT_ERROR_KIND(canonical_u0(1), ErrorKind::InvalidK);
}

TEST(PermutationUnitaries, AllPermutations) {
  const auto ps = permutation_unitaries(3);
  EXPECT_EQ(ps.size(), 6u);
  for (const auto& p : ps) EXPECT_LT(unitarity_defect(p), 1e-15);
}

TEST(CertifyMinSupport, KEqualsMinimalSupport) {
  for (int k : {2, 3, 4}) {
    const EigenGrid g = default_grid(k);
    const ShiftPair pair = generate_k_diagonal_pair(g);
    const MinSupportCertificate c = certify_min_support(pair.s, pair.t, g, k);
    EXPECT_EQ(c.min_support, k);
    EXPECT_TRUE(c.certified);
    for (int j = 1; j <= k; ++j) EXPECT_EQ(c.admissible_rows[static_cast<std::size_t>(j - 1)], std::vector<int>{j});
  }
}

TEST(CertifyMinSupport, SearchBoundBelowKFindsNothing) {
  const EigenGrid g = default_grid(3);
  const ShiftPair pair = generate_k_diagonal_pair(g);
  const MinSupportCertificate c = certify_min_support(pair.s, pair.t, g, 2);
  EXPECT_EQ(c.min_support, -1);
  EXPECT_FALSE(c.certified);
}

TEST(CertifyMinSupport, RejectsWrongShape) {
  const EigenGrid g = default_grid(2);
  const ShiftPair pair = generate_k_diagonal_pair(g);
  testing::Rng rng(1);
  const CMatrix q = random_unitary(2, rng);
  const WeightSequence rotated = transform_weights(pair.t, [&](const CMatrix& w) { return CMatrix(q * w * q.adjoint()); });
  EXPECT_ERROR_KIND(certify_min_support(pair.s, rotated, g, 2), ErrorKind::NotExampleShape);
  EXPECT_ERROR_KIND(certify_min_support(pair.t, pair.t, g, 2), ErrorKind::NotExampleShape);
  EXPECT_ERROR_KIND(certify_min_support(WeightSequence::identity_weights(3), pair.t, g, 2), ErrorKind::DimensionMismatch);
}

TEST(BranchShiftPair, GeneratorBookkeeping) {
  testing::Rng rng(2);
  const BranchShiftPair pair = branch_shift_pair(rng, 2, -1, true);
  for (int n = -8; n <= 8; ++n) {
    const CVector va = pair.s_branch[0];
    const CVector vb = pair.s_branch[1];
    const Complex la = va.dot(pair.s.at(n) * va);
    const Complex lb = vb.dot(pair.s.at(n) * vb);
    // T carries branch a at n + tau_a along t_branch[0]
    const CVector wa = pair.t_branch[0];
    const CVector wb = pair.t_branch[1];
    EXPECT_NEAR(std::abs(wa.dot(pair.t.at(n + 2) * wa) - la), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(wb.dot(pair.t.at(n - 1) * wb) - lb), 0.0, 1e-12);
  }
  EXPECT_ERROR_KIND(branch_shift_pair(rng, 0, 0, false, 3, 2), ErrorKind::InvalidArgument);
}

TEST(BranchShiftPair, DeterministicForSeed) {
  testing::Rng a(9);
  testing::Rng b(9);
  const BranchShiftPair pa = branch_shift_pair(a, 1, 0, false);
  const BranchShiftPair pb = branch_shift_pair(b, 1, 0, false);
  EXPECT_LT((pa.t.at(0) - pb.t.at(0)).norm(), 0.0 + 1e-300);
}

}  // namespace
}  // namespace wshift
