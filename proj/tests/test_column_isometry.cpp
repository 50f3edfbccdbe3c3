#include <gtest/gtest.h>

#include "test_support.hpp"

namespace wshift {
namespace {

TEST(ColumnIsometry, SortsRowsAndMeasuresDefect) {
  const ColumnIsometry c(2, {{3, diag({0.0, 1.0})}, {-1, diag({1.0, 0.0})}});
  EXPECT_EQ(c.min_row(), -1);
  EXPECT_EQ(c.max_row(), 3);
  EXPECT_EQ(c.support().front().row, -1);
  EXPECT_LT(c.isometry_defect(), 1e-15);
  const ColumnIsometry half = ColumnIsometry::embedding(0, 0.5 * identity(2));
  EXPECT_NEAR(half.isometry_defect(), 0.75, 1e-15);
}

TEST(ColumnIsometry, RejectsDuplicatesEmptyAndBadBlocks) {
  EXPECT_ERROR_KIND(ColumnIsometry(1, {{0, identity(1)}, {0, identity(1)}}), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(ColumnIsometry(1, {}), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(ColumnIsometry(2, {{0, identity(3)}}), ErrorKind::DimensionMismatch);
}

TEST(ColumnIsometry, EmbedAndExtractRoundTrip) {
  const ColumnIsometry c(2, {{-2, diag({1.0, 0.0})}, {1, diag({0.0, 1.0})}});
  const BandedOperator op = c.embed(4);
  EXPECT_TRUE(op.contains(-2, 0));
  EXPECT_TRUE(op.contains(1, 0));
  const ColumnIsometry back = ColumnIsometry::from_operator_column(op, 0);
  ASSERT_EQ(back.support().size(), 2u);
  EXPECT_EQ(back.min_row(), -2);
  EXPECT_ERROR_KIND(c.embed(1), ErrorKind::WindowTooSmall);
}

TEST(ColumnIsometry, FromOperatorColumnIsRelativeToColumn) {
  BandedOperator a(1, 4);
  a.set(3, 1, diag({2.0}));
  const ColumnIsometry c = ColumnIsometry::from_operator_column(a, 1);
  EXPECT_EQ(c.min_row(), 2);
}

TEST(ColumnIsometry, SignedPowerMatchesTruncatedPowerInWindow) {
  testing::Rng rng(1);
  const WeightSequence t = testing::random_windowed(2, -8, 8, rng);
  const ColumnIsometry u0(2, {{-1, testing::random_invertible(2, rng)}, {2, testing::random_invertible(2, rng)}});
  const int window = 8;
  for (int k = -4; k <= 4; ++k) {
    const BlockColumn exact = apply_signed_power(t, k, to_block_column(u0));
    const BandedOperator truncated = shift_power_signed(t, k, window) * u0.embed(window);
    for (const auto& [row, blk] : exact) {
      ASSERT_TRUE(std::abs(row) <= window);
      EXPECT_LT((truncated.block(row, 0) - blk).norm(), 1e-12) << "k = " << k << ", row = " << row;
    }
  }
}

TEST(ColumnIsometry, InnerProductAndOrthonormalRange) {
  testing::Rng rng(2);
  BlockColumn col;
  col.emplace(0, testing::random_invertible(2, rng));
  col.emplace(3, testing::random_invertible(2, rng));
  const BlockColumn q = orthonormal_range(col);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_LT((column_inner(q, q) - identity(2)).norm(), 1e-13);
  // same range: q spans col
  const CMatrix coeff = column_inner(q, col);
  for (const auto& [row, blk] : col) EXPECT_LT((q.at(row) * coeff - blk).norm(), 1e-12);
  EXPECT_EQ(column_inner(BlockColumn{}, q).size(), 0);
  EXPECT_TRUE(orthonormal_range(BlockColumn{}).empty());
}

TEST(ColumnIsometry, OrthonormalRangeDropsRankDeficientDirections) {
  BlockColumn col;
  col.emplace(0, diag({1.0, 0.0}));
  const BlockColumn q = orthonormal_range(col);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.at(0).cols(), 1);
}

}  // namespace
}  // namespace wshift
