#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wshift/matrix.hpp"

namespace wshift {

/// Finite section of a block operator on l^2(Z, C^m): rows and columns are
/// restricted to the index window [-N, N], blocks are m x m, and only non-zero
/// blocks are stored.
class BandedOperator {
 public:
  using Key = std::pair<int, int>;  // (row, column)

  BandedOperator(Eigen::Index dim, int window) : dim_(dim), window_(window) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "block dimension must be positive");
    if (window < 0) throw Error(ErrorKind::InvalidArgument, "window must be non-negative");
  }

  static BandedOperator identity(Eigen::Index dim, int window) {
    BandedOperator op(dim, window);
    for (int i = -window; i <= window; ++i) op.set(i, i, wshift::identity(dim));
    return op;
  }

  /// D[(A_i)]: block (i, i) = blocks(i).
  template <typename F>
  static BandedOperator diagonal(Eigen::Index dim, int window, F&& blocks) {
    BandedOperator op(dim, window);
    for (int i = -window; i <= window; ++i) op.set(i, i, blocks(i));
    return op;
  }

  /// Reads a dense ((2N+1) m)-square matrix into blocks, dropping exact zeros.
  static BandedOperator from_dense(const CMatrix& dense, Eigen::Index dim, int window) {
    BandedOperator op(dim, window);
    const Eigen::Index size = (2 * window + 1) * dim;
    if (dense.rows() != size || dense.cols() != size) {
      throw Error(ErrorKind::DimensionMismatch, "dense matrix does not match the block window");
    }
    for (int i = -window; i <= window; ++i) {
      for (int j = -window; j <= window; ++j) {
        op.set(i, j, dense.block(op.offset(i), op.offset(j), dim, dim));
      }
    }
    return op;
  }

  Eigen::Index dim() const noexcept { return dim_; }
  int window() const noexcept { return window_; }
  bool in_window(int i) const noexcept { return i >= -window_ && i <= window_; }

  /// Stores a block; all-zero blocks are erased so the band stays exact.
  void set(int row, int col, const CMatrix& block) {
    if (!in_window(row) || !in_window(col)) {
      throw Error(ErrorKind::WindowTooSmall, "block (" + std::to_string(row) + ", " + std::to_string(col) +
                                                 ") lies outside [-" + std::to_string(window_) + ", " +
                                                 std::to_string(window_) + "]");
    }
    require_square(block, dim_, "BandedOperator::set");
    if (block.isZero(0.0)) {
      blocks_.erase({row, col});
    } else {
      blocks_[{row, col}] = block;
    }
  }

  void add(int row, int col, const CMatrix& block) {
    const auto it = blocks_.find({row, col});
    if (it == blocks_.end()) {
      set(row, col, block);
    } else {
      set(row, col, CMatrix(it->second + block));
    }
  }

  bool contains(int row, int col) const { return blocks_.count({row, col}) != 0; }

  CMatrix block(int row, int col) const {
    const auto it = blocks_.find({row, col});
    return it == blocks_.end() ? zeros(dim_) : it->second;
  }

  const std::map<Key, CMatrix>& blocks() const noexcept { return blocks_; }

  /// Offsets d = row - col carrying a block of positive Frobenius norm.
  std::set<int> band() const {
    std::set<int> out;
    for (const auto& [key, b] : blocks_) {
      if (b.norm() > 0.0) out.insert(key.first - key.second);
    }
    return out;
  }

  /// (A*)_{i,j} = (A_{j,i})*.
  BandedOperator adjoint() const {
    BandedOperator out(dim_, window_);
    for (const auto& [key, b] : blocks_) out.blocks_[{key.second, key.first}] = b.adjoint();
    return out;
  }

  /// Product of the two finite sections (summation restricted to the window).
  BandedOperator operator*(const BandedOperator& rhs) const {
    check_compatible(rhs);
    std::map<int, std::vector<std::pair<int, const CMatrix*>>> rhs_rows;
    for (const auto& [key, b] : rhs.blocks_) rhs_rows[key.first].emplace_back(key.second, &b);
    BandedOperator out(dim_, window_);
    for (const auto& [key, a] : blocks_) {
      const auto it = rhs_rows.find(key.second);
      if (it == rhs_rows.end()) continue;
      for (const auto& [col, b] : it->second) out.add(key.first, col, a * *b);
    }
    return out;
  }

  BandedOperator operator+(const BandedOperator& rhs) const {
    check_compatible(rhs);
    BandedOperator out = *this;
    for (const auto& [key, b] : rhs.blocks_) out.add(key.first, key.second, b);
    return out;
  }

  BandedOperator operator-(const BandedOperator& rhs) const {
    check_compatible(rhs);
    BandedOperator out = *this;
    for (const auto& [key, b] : rhs.blocks_) out.add(key.first, key.second, -b);
    return out;
  }

  bool operator==(const BandedOperator& rhs) const {
    if (dim_ != rhs.dim_ || window_ != rhs.window_ || blocks_.size() != rhs.blocks_.size()) return false;
    return std::equal(blocks_.begin(), blocks_.end(), rhs.blocks_.begin(),
                      [](const auto& a, const auto& b) { return a.first == b.first && a.second == b.second; });
  }

  CMatrix to_dense() const {
    const Eigen::Index size = (2 * window_ + 1) * dim_;
    CMatrix dense = CMatrix::Zero(size, size);
    for (const auto& [key, b] : blocks_) dense.block(offset(key.first), offset(key.second), dim_, dim_) = b;
    return dense;
  }

  /// Largest spectral norm of a single block.
  double max_block_norm() const {
    double out = 0.0;
    for (const auto& [key, b] : blocks_) out = std::max(out, spectral_norm(b));
    return out;
  }

  Eigen::Index offset(int i) const noexcept { return (i + window_) * dim_; }

 private:
  void check_compatible(const BandedOperator& rhs) const {
    if (dim_ != rhs.dim_ || window_ != rhs.window_) {
      throw Error(ErrorKind::DimensionMismatch, "banded operators differ in block dimension or window");
    }
  }

  Eigen::Index dim_;
  int window_;
  std::map<Key, CMatrix> blocks_;
};

/// Interior index range |i| <= N - margin.
struct Interior {
  int lo;
  int hi;
  bool contains(int i) const noexcept { return i >= lo && i <= hi; }
};

inline Interior interior_of(const BandedOperator& a, int margin) {
  return {-a.window() + margin, a.window() - margin};
}

/// Max block Frobenius norm of A - B over interior rows and columns.
inline double interior_difference(const BandedOperator& a, const BandedOperator& b, int margin) {
  const BandedOperator diff = a - b;
  const Interior in = interior_of(a, margin);
  double out = 0.0;
  for (const auto& [key, blk] : diff.blocks()) {
    if (in.contains(key.first) && in.contains(key.second)) out = std::max(out, blk.norm());
  }
  return out;
}

/// max(||(U*U - I)_{a,b}||_F, ||(UU* - I)_{a,b}||_F) over interior blocks.
inline double unitarity_residual(const BandedOperator& u, int margin) {
  const BandedOperator id = BandedOperator::identity(u.dim(), u.window());
  return std::max(interior_difference(u.adjoint() * u, id, margin),
                  interior_difference(u * u.adjoint(), id, margin));
}

/// Offsets d whose largest interior block exceeds tol times the largest block.
inline std::set<int> diagonal_support(const BandedOperator& u, double tol, int margin = 0) {
  double largest = 0.0;
  for (const auto& [key, b] : u.blocks()) largest = std::max(largest, b.norm());
  std::map<int, double> per_offset;
  const Interior in = interior_of(u, margin);
  for (const auto& [key, b] : u.blocks()) {
    if (!in.contains(key.first) || !in.contains(key.second)) continue;
    auto& slot = per_offset[key.first - key.second];
    slot = std::max(slot, b.norm());
  }
  std::set<int> out;
  for (const auto& [d, norm] : per_offset) {
    if (norm > tol * largest) out.insert(d);
  }
  return out;
}

}  // namespace wshift
