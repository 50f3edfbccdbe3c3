#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wshift/banded_operator.hpp"
#include "wshift/weight_sequence.hpp"

namespace wshift {

struct ColumnBlock {
  int row;
  CMatrix block;
};

/// Finitely supported map C^m -> l^2(Z, C^m), x |-> (U_{i,0} x)_i. Rows are
/// distinct and sorted. Isometry is checked by the consumers, not here.
class ColumnIsometry {
 public:
  ColumnIsometry(Eigen::Index dim, std::vector<ColumnBlock> support) : dim_(dim), support_(std::move(support)) {
    std::sort(support_.begin(), support_.end(), [](const auto& a, const auto& b) { return a.row < b.row; });
    for (std::size_t k = 0; k < support_.size(); ++k) {
      require_square(support_[k].block, dim_, "ColumnIsometry block");
      if (k > 0 && support_[k].row == support_[k - 1].row) {
        throw Error(ErrorKind::InvalidArgument, "duplicate row " + std::to_string(support_[k].row) + " in column");
      }
    }
    if (support_.empty()) throw Error(ErrorKind::InvalidArgument, "column needs at least one block");
  }

  /// x |-> (block x)^{(row)}.
  static ColumnIsometry embedding(int row, const CMatrix& block) {
    return ColumnIsometry(block.rows(), {{row, block}});
  }

  /// Zeroth column of a banded operator.
  static ColumnIsometry from_operator_column(const BandedOperator& u, int col = 0) {
    std::vector<ColumnBlock> out;
    for (const auto& [key, b] : u.blocks()) {
      if (key.second == col) out.push_back({key.first - col, b});
    }
    return ColumnIsometry(u.dim(), std::move(out));
  }

  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<ColumnBlock>& support() const noexcept { return support_; }
  int min_row() const noexcept { return support_.front().row; }
  int max_row() const noexcept { return support_.back().row; }

  /// ||sum_i U_{i,0}* U_{i,0} - I||_F / sqrt(m).
  double isometry_defect() const {
    CMatrix gram = zeros(dim_);
    for (const auto& [row, b] : support_) gram += b.adjoint() * b;
    return (gram - identity(dim_)).norm() / std::sqrt(static_cast<double>(dim_));
  }

  /// The column placed as column 0 of a finite section.
  BandedOperator embed(int window) const {
    BandedOperator op(dim_, window);
    for (const auto& [row, b] : support_) op.set(row, 0, b);
    return op;
  }

 private:
  Eigen::Index dim_;
  std::vector<ColumnBlock> support_;
};

/// A vector-valued column over Z: row -> (m x c) block. Used for exact
/// (untruncated) images of a ColumnIsometry.
using BlockColumn = std::map<int, CMatrix>;

inline BlockColumn to_block_column(const ColumnIsometry& u0) {
  BlockColumn out;
  for (const auto& [row, b] : u0.support()) out.emplace(row, b);
  return out;
}

/// Exact T^[k] applied to a finitely supported column: for k >= 1 row s moves
/// to s + k and picks up T_{s+k} ... T_{s+1}; for k <= -1 it moves to s - |k|
/// and picks up T*_{s-|k|+1} ... T*_s.
inline BlockColumn apply_signed_power(const WeightSequence& t, int k, const BlockColumn& column) {
  BlockColumn out;
  for (const auto& [row, b] : column) {
    if (k == 0) {
      out.emplace(row, b);
    } else if (k > 0) {
      out.emplace(row + k, forward_product(t, row, k) * b);
    } else {
      out.emplace(row + k, backward_adjoint_product(t, row, -k) * b);
    }
  }
  return out;
}

/// sum_r a_r* b_r over shared rows.
inline CMatrix column_inner(const BlockColumn& a, const BlockColumn& b) {
  if (a.empty() || b.empty()) return CMatrix();
  CMatrix out = CMatrix::Zero(a.begin()->second.cols(), b.begin()->second.cols());
  for (const auto& [row, blk] : a) {
    const auto it = b.find(row);
    if (it != b.end()) out += blk.adjoint() * it->second;
  }
  return out;
}

/// Orthonormal basis (via SVD) of the range of a block column. Directions with
/// singular value below rel_tol x the largest are discarded.
inline BlockColumn orthonormal_range(const BlockColumn& column, double rel_tol = 1e-12) {
  if (column.empty()) return {};
  const Eigen::Index m = column.begin()->second.rows();
  const Eigen::Index c = column.begin()->second.cols();
  CMatrix stacked(static_cast<Eigen::Index>(column.size()) * m, c);
  Eigen::Index r = 0;
  for (const auto& [row, blk] : column) {
    stacked.middleRows(r, m) = blk;
    r += m;
  }
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
  BlockColumn out;
  if (rank == 0) return out;
  const CMatrix basis = svd.matrixU().leftCols(rank);
  r = 0;
  for (const auto& [row, blk] : column) {
    out.emplace(row, basis.middleRows(r, m));
    r += m;
  }
  return out;
}

}  // namespace wshift
