#pragma once

// Example families: the k-diagonal pair on C^k with its minimal-support
// certificate, and fabricated branch-shift pairs on C^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wshift/column_isometry.hpp"
#include "wshift/weight_sequence.hpp"

namespace wshift {

/// Positive values x_{n,i}, lo <= n <= hi, 1 <= i <= k, pairwise distinct.
/// Outside the window x is 1, matching the identity padding of the weights.
struct EigenGrid {
  int k = 2;
  int lo = 0;
  int hi = -1;
  std::vector<std::vector<double>> values;  // values[n - lo][i - 1]

  double x(int n, int i) const {
    if (n < lo || n > hi) return 1.0;
    return values[static_cast<std::size_t>(n - lo)][static_cast<std::size_t>(i - 1)];
  }

  int length() const noexcept { return hi - lo + 1; }

  /// Throws InvalidK, GridTooShort, NotExampleShape or DistinctnessViolated.
  void validate(double min_gap = 1e-9) const {
    if (k < 2) throw Error(ErrorKind::InvalidK, "k must be at least 2, got " + std::to_string(k));
    if (length() < k + 1 || static_cast<int>(values.size()) != length()) {
      throw Error(ErrorKind::GridTooShort, "grid window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                               "] is too short for k = " + std::to_string(k));
    }
    std::vector<std::pair<double, std::pair<int, int>>> all;
    for (int n = lo; n <= hi; ++n) {
      const auto& row = values[static_cast<std::size_t>(n - lo)];
      if (static_cast<int>(row.size()) != k) throw Error(ErrorKind::NotExampleShape, "grid row of wrong length");
      for (int i = 1; i <= k; ++i) {
        const double v = row[static_cast<std::size_t>(i - 1)];
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw Error(ErrorKind::NotExampleShape, "grid value x(" + std::to_string(n) + ", " + std::to_string(i) +
                                                      ") is not positive");
        }
        all.push_back({v, {n, i}});
      }
    }
    std::sort(all.begin(), all.end());
    for (std::size_t a = 1; a < all.size(); ++a) {
      if (all[a].first - all[a - 1].first <= min_gap * all.back().first) {
        throw Error(ErrorKind::DistinctnessViolated,
                    "x(" + std::to_string(all[a - 1].second.first) + ", " + std::to_string(all[a - 1].second.second) +
                        ") and x(" + std::to_string(all[a].second.first) + ", " +
                        std::to_string(all[a].second.second) + ") coincide");
      }
    }
  }
};

/// x_{n,i} = 2 + 0.1 (10 (n - lo) + i): distinct with gap 0.1 for k <= 9.
inline EigenGrid default_grid(int k, int lo = -6, int hi = 6) {
  EigenGrid g{k, lo, hi, {}};
  for (int n = lo; n <= hi; ++n) {
    std::vector<double> row;
    for (int i = 1; i <= k; ++i) row.push_back(2.0 + 0.1 * (10.0 * (n - lo) + i));
    g.values.push_back(std::move(row));
  }
  return g;
}

struct ShiftPair {
  WeightSequence s;
  WeightSequence t;
};

/// S_n = diag(x_{n,1}, ..., x_{n,k}),  T_n = diag(x_{n-1,1}, x_{n-2,2}, ..., x_{n-k,k}).
inline ShiftPair generate_k_diagonal_pair(const EigenGrid& grid) {
  grid.validate();
  const int k = grid.k;
  std::vector<CMatrix> s;
  for (int n = grid.lo; n <= grid.hi; ++n) {
    CMatrix w = zeros(k);
    for (int i = 1; i <= k; ++i) w(i - 1, i - 1) = grid.x(n, i);
    s.push_back(std::move(w));
  }
  std::vector<CMatrix> t;
  for (int n = grid.lo + 1; n <= grid.hi + k; ++n) {
    CMatrix w = zeros(k);
    for (int i = 1; i <= k; ++i) w(i - 1, i - 1) = grid.x(n - i, i);
    t.push_back(std::move(w));
  }
  return {WeightSequence::windowed(k, grid.lo, std::move(s)), WeightSequence::windowed(k, grid.lo + 1, std::move(t))};
}

/// Rows 1..k; the block at row i projects onto span{e_i}.
inline ColumnIsometry canonical_u0(int k) {
  if (k < 2) throw Error(ErrorKind::InvalidK, "k must be at least 2");
  std::vector<ColumnBlock> blocks;
  for (int i = 1; i <= k; ++i) {
    CMatrix p = zeros(k);
    p(i - 1, i - 1) = 1.0;
    blocks.push_back({i, std::move(p)});
  }
  return ColumnIsometry(k, std::move(blocks));
}

/// Permutation matrices on C^k: the unitaries pairing standard eigenbases.
inline std::vector<CMatrix> permutation_unitaries(int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::vector<CMatrix> out;
  do {
    CMatrix p = zeros(k);
    for (int i = 0; i < k; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
    out.push_back(std::move(p));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

struct MinSupportCertificate {
  int k = 0;
  /// admissible_rows[j-1]: rows n at which some non-zero u satisfies
  /// x_{l,j} u = T_{n+l} u for every l in the grid window.
  std::vector<std::vector<int>> admissible_rows;
  /// Smallest number of rows covering every j; -1 when none exists within
  /// max_support rows.
  int min_support = -1;
  bool certified = false;  // min_support == k
};

/// Re-derives the eigenvalue-locality argument: column e_j of any intertwining
/// zeroth column can only be non-zero at rows where the branch (x_{l,j})_l is an
/// eigenvalue branch of (T_{n+l})_l. With those rows fixed, a zeroth column
/// needs at least min_support non-zero blocks, and a unitary intertwining
/// positive-weight shifts is block Toeplitz, so it has at least that many
/// non-zero diagonals.
inline MinSupportCertificate certify_min_support(const WeightSequence& s, const WeightSequence& t,
                                                 const EigenGrid& grid, int max_support, double tol = 1e-9) {
  grid.validate();
  const int k = grid.k;
  if (s.dim() != k || t.dim() != k) throw Error(ErrorKind::DimensionMismatch, "weights do not act on C^k");
  const int reach = grid.length() + k;
  const auto check_shape = [&](const WeightSequence& seq, int n) {
    const CMatrix& w = seq.at(n);
    const CMatrix off = w - CMatrix(w.diagonal().asDiagonal());
    if (off.norm() > tol * w.norm() || (w.diagonal().imag().cwiseAbs().maxCoeff() > tol * w.norm()) ||
        w.diagonal().real().minCoeff() <= 0.0) {
      throw Error(ErrorKind::NotExampleShape, "weight at index " + std::to_string(n) + " is not diagonal positive");
    }
  };
  for (int n = grid.lo; n <= grid.hi; ++n) {
    check_shape(s, n);
    for (int i = 1; i <= k; ++i) {
      if (std::abs(s.at(n)(i - 1, i - 1).real() - grid.x(n, i)) > tol * grid.x(n, i)) {
        throw Error(ErrorKind::NotExampleShape, "S does not match the grid at index " + std::to_string(n));
      }
    }
  }
  for (int n = grid.lo - reach; n <= grid.hi + 2 * reach; ++n) check_shape(t, n);

  double scale = 1.0;
  for (const auto& row : grid.values) scale = std::max(scale, *std::max_element(row.begin(), row.end()));

  MinSupportCertificate cert;
  cert.k = k;
  cert.admissible_rows.resize(static_cast<std::size_t>(k));
  const int len = grid.length();
  for (int j = 1; j <= k; ++j) {
    for (int n = -reach; n <= reach; ++n) {
      CMatrix stacked(static_cast<Eigen::Index>(len) * k, k);
      for (int l = grid.lo; l <= grid.hi; ++l) {
        stacked.middleRows(static_cast<Eigen::Index>(l - grid.lo) * k, k) = t.at(n + l) - grid.x(l, j) * identity(k);
      }
      const RVector sv = singular_values(stacked);
      if (sv(sv.size() - 1) <= tol * scale) cert.admissible_rows[static_cast<std::size_t>(j - 1)].push_back(n);
    }
  }

  std::vector<int> candidates;
  for (const auto& rows : cert.admissible_rows) {
    if (rows.empty()) return cert;
    candidates.insert(candidates.end(), rows.begin(), rows.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const int c = static_cast<int>(candidates.size());
  const auto covers = [&](const std::vector<int>& chosen) {
    return std::all_of(cert.admissible_rows.begin(), cert.admissible_rows.end(), [&](const auto& rows) {
      return std::any_of(rows.begin(), rows.end(), [&](int r) {
        return std::find(chosen.begin(), chosen.end(), r) != chosen.end();
      });
    });
  };
  for (int size = 1; size <= std::min(max_support, c) && cert.min_support < 0; ++size) {
    std::vector<bool> pick(static_cast<std::size_t>(c), false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::vector<int> chosen;
      for (int a = 0; a < c; ++a) {
        if (pick[static_cast<std::size_t>(a)]) chosen.push_back(candidates[static_cast<std::size_t>(a)]);
      }
      if (covers(chosen)) {
        cert.min_support = size;
        break;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  cert.certified = cert.min_support == k;
  return cert;
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
template <typename Rng>
CMatrix random_unitary(Eigen::Index m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// A positive commuting pair on C^2 where T carries S's eigenvalue branches
/// shifted by tau, with a rotated eigenbasis and optionally exchanged branches.
struct BranchShiftPair {
  WeightSequence s;
  WeightSequence t;
  std::array<CVector, 2> s_branch;  // S eigenvector of branch a, branch b
  std::array<CVector, 2> t_branch;  // T eigenvector carrying branch a, branch b
  std::array<int, 2> tau;           // row offset of branch a, branch b
};

/// Branch a takes values in [2, 3], branch b in [4, 5], on the window [lo, hi];
/// T_n carries a_{n - tau_a} and b_{n - tau_b} (1 outside the window).
template <typename Rng>
BranchShiftPair branch_shift_pair(Rng& rng, int tau_a, int tau_b, bool swap, int lo = -6, int hi = 6) {
  if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty window");
  std::uniform_real_distribution<double> ua(2.0, 3.0);
  std::uniform_real_distribution<double> ub(4.0, 5.0);
  std::vector<double> a;
  std::vector<double> b;
  for (int n = lo; n <= hi; ++n) {
    a.push_back(ua(rng));
    b.push_back(ub(rng));
  }
  const auto va = [&](int n) { return (n < lo || n > hi) ? 1.0 : a[static_cast<std::size_t>(n - lo)]; };
  const auto vb = [&](int n) { return (n < lo || n > hi) ? 1.0 : b[static_cast<std::size_t>(n - lo)]; };
  const CMatrix q = random_unitary(2, rng);
  const CMatrix r = random_unitary(2, rng);

  std::vector<CMatrix> sw;
  for (int n = lo; n <= hi; ++n) sw.push_back(q * diag({va(n), vb(n)}) * q.adjoint());
  const int t_lo = lo + std::min(tau_a, tau_b);
  const int t_hi = hi + std::max(tau_a, tau_b);
  std::vector<CMatrix> tw;
  for (int n = t_lo; n <= t_hi; ++n) {
    const Complex first = swap ? vb(n - tau_b) : va(n - tau_a);
    const Complex second = swap ? va(n - tau_a) : vb(n - tau_b);
    tw.push_back(r * diag({first, second}) * r.adjoint());
  }
  BranchShiftPair out{WeightSequence::windowed(2, lo, std::move(sw)), WeightSequence::windowed(2, t_lo, std::move(tw)),
                      {q.col(0), q.col(1)},
                      {swap ? CVector(r.col(1)) : CVector(r.col(0)), swap ? CVector(r.col(0)) : CVector(r.col(1))},
                      {tau_a, tau_b}};
  return out;
}

}  // namespace wshift
