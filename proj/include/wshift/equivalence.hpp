#pragma once

// Unitary equivalence of bilateral weighted shifts: verification of a candidate
// zeroth column, reconstruction of the intertwining unitary from it, and the
// diagonal-form, spectral, polar-factor and block-Toeplitz checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wshift/banded_operator.hpp"
#include "wshift/column_isometry.hpp"
#include "wshift/polar.hpp"
#include "wshift/shift.hpp"
#include "wshift/weight_sequence.hpp"

namespace wshift {

struct VerifyParams {
  int n_max = 3;
  int window = 8;
  int margin = 3;
  double tol = kDefaultTol;
  double rank_rel_tol = 1e-6;
};

struct EquivalenceReport {
  VerifyParams params;
  double residual_moduli_forward = 0.0;
  double residual_moduli_backward = 0.0;
  double residual_wandering = 0.0;
  double span_defect = 0.0;
  double span_threshold = 0.0;
  bool pass_moduli_forward = false;
  bool pass_moduli_backward = false;
  bool pass_wandering = false;
  bool pass_span = false;

  bool passed() const noexcept {
    return pass_moduli_forward && pass_moduli_backward && pass_wandering && pass_span;
  }
};

/// Thrown when a construction is refused because its verification failed.
class VerificationError : public Error {
 public:
  VerificationError(ErrorKind kind, const std::string& what, EquivalenceReport report)
      : Error(kind, what), report_(std::move(report)) {}
  const EquivalenceReport& report() const noexcept { return report_; }

 private:
  EquivalenceReport report_;
};

namespace detail {

inline void require_same_dim(const WeightSequence& s, const WeightSequence& t) {
  if (s.dim() != t.dim()) throw Error(ErrorKind::DimensionMismatch, "S and T act on different spaces");
}

/// ||lhs - rhs||_F / max(||a||_2, ||b||_2).
inline double scaled_gap(const CMatrix& lhs, const CMatrix& rhs, const CMatrix& a, const CMatrix& b) {
  const double scale = std::max({spectral_norm(a), spectral_norm(b), std::numeric_limits<double>::min()});
  return (lhs - rhs).norm() / scale;
}

}  // namespace detail

/// Max over interior (i, j) of
///   ||A_{i+n,j+n} S_{j+n}...S_{j+1} - T_{i+n}...T_{i+1} A_{i,j}||_F
/// divided by max(||A||, 1) max(||S||, ||T||)^n. Interior means i, j, i+n and
/// j+n all satisfy |index| <= N - margin. Zero means A S^n = T^n A there.
inline double intertwining_residual(const BandedOperator& a, const WeightSequence& s, const WeightSequence& t,
                                    int n, int margin) {
  if (a.dim() != s.dim() || a.dim() != t.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "operator and weights differ in dimension");
  }
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "intertwining_residual needs n >= 1");
  const Interior in = interior_of(a, margin);
  std::set<BandedOperator::Key> anchors;
  for (const auto& [key, b] : a.blocks()) {
    anchors.insert(key);
    anchors.insert({key.first - n, key.second - n});
  }
  std::map<int, CMatrix> s_products;
  std::map<int, CMatrix> t_products;
  const auto cached = [n](std::map<int, CMatrix>& cache, const WeightSequence& seq, int j) -> const CMatrix& {
    auto it = cache.find(j);
    if (it == cache.end()) it = cache.emplace(j, forward_product(seq, j, n)).first;
    return it->second;
  };
  double worst = 0.0;
  for (const auto& [i, j] : anchors) {
    if (!in.contains(i) || !in.contains(j) || !in.contains(i + n) || !in.contains(j + n)) continue;
    const CMatrix lhs = a.block(i + n, j + n) * cached(s_products, s, j);
    const CMatrix rhs = cached(t_products, t, i) * a.block(i, j);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  const double scale = std::max(a.max_block_norm(), 1.0) * std::pow(std::max(s.sup_norm(), t.sup_norm()), n);
  return worst / scale;
}

/// Checks the four conditions characterizing a zeroth column U_0 of a unitary
/// U with U S = T U:
///   (a) U_0 |S_n...S_1| = D[|T_{i+n}...T_{i+1}|] U_0, 1 <= n <= n_max,
///   (b) U_0 |S*_{-n+1}...S*_0| = D[|T*_{i-n+1}...T*_i|] U_0, 1 <= n <= n_max,
///   (c) ranges of T^[k] U_0 mutually orthogonal for |k| <= n_max,
///   (d) ranges of T^[i] U_0, |i| <= 2N, span every interior row.
/// Moduli residuals are relative; the wandering residual is the cosine of the
/// smallest principal angle between two ranges. Span is a rank test on the
/// orthonormalized ranges restricted to rows |r| <= N - margin.
inline EquivalenceReport verify_u0(const ColumnIsometry& u0, const WeightSequence& s, const WeightSequence& t,
                                   const VerifyParams& params) {
  detail::require_same_dim(s, t);
  if (u0.dim() != s.dim()) throw Error(ErrorKind::DimensionMismatch, "U0 and weights differ in dimension");
  if (params.n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  if (params.margin < 0 || params.margin >= params.window) {
    throw Error(ErrorKind::InvalidArgument, "margin must lie in [0, N)");
  }
  const double defect = u0.isometry_defect();
  if (defect > params.tol) {
    throw Error(ErrorKind::IsometryViolation, "sum U_i0* U_i0 differs from I by " + std::to_string(defect));
  }
  const int reach = params.window - params.n_max;
  if (u0.min_row() < -reach || u0.max_row() > reach) {
    throw Error(ErrorKind::WindowTooSmall, "support rows [" + std::to_string(u0.min_row()) + ", " +
                                               std::to_string(u0.max_row()) + "] do not fit within N - n_max = " +
                                               std::to_string(reach));
  }

  EquivalenceReport report;
  report.params = params;

  for (int n = 1; n <= params.n_max; ++n) {
    const CMatrix ps = modulus_product(s, 0, n);
    const CMatrix ps_adj = adjoint_modulus_product(s, 0, n);
    for (const auto& [row, b] : u0.support()) {
      const CMatrix pt = modulus_product(t, row, n);
      report.residual_moduli_forward =
          std::max(report.residual_moduli_forward, detail::scaled_gap(b * ps, pt * b, ps, pt));
      const CMatrix pt_adj = adjoint_modulus_product(t, row, n);
      report.residual_moduli_backward =
          std::max(report.residual_moduli_backward, detail::scaled_gap(b * ps_adj, pt_adj * b, ps_adj, pt_adj));
    }
  }

  const BlockColumn base = to_block_column(u0);
  std::map<int, BlockColumn> ranges;
  const int span_reach = 2 * params.window;
  for (int k = -span_reach; k <= span_reach; ++k) {
    ranges.emplace(k, orthonormal_range(apply_signed_power(t, k, base)));
  }

  for (int k = -params.n_max; k <= params.n_max; ++k) {
    for (int m = k + 1; m <= params.n_max; ++m) {
      const CMatrix g = column_inner(ranges.at(k), ranges.at(m));
      if (g.size() > 0) report.residual_wandering = std::max(report.residual_wandering, spectral_norm(g));
    }
  }

  const int row_hi = params.window - params.margin;
  const Eigen::Index m = s.dim();
  const Eigen::Index rows = (2 * row_hi + 1) * m;
  Eigen::Index cols = 0;
  for (const auto& [k, q] : ranges) {
    if (!q.empty()) cols += q.begin()->second.cols();
  }
  CMatrix stacked = CMatrix::Zero(rows, cols);
  Eigen::Index c = 0;
  for (const auto& [k, q] : ranges) {
    if (q.empty()) continue;
    const Eigen::Index width = q.begin()->second.cols();
    for (const auto& [row, blk] : q) {
      if (row >= -row_hi && row <= row_hi) stacked.block((row + row_hi) * m, c, m, width) = blk;
    }
    c += width;
  }
  const RVector sv = singular_values(stacked);
  const double largest = sv.size() ? sv(0) : 0.0;
  report.span_defect = (cols >= rows && sv.size() == rows) ? sv(rows - 1) : 0.0;
  report.span_threshold = params.rank_rel_tol * largest;

  report.pass_moduli_forward = report.residual_moduli_forward <= params.tol;
  report.pass_moduli_backward = report.residual_moduli_backward <= params.tol;
  report.pass_wandering = report.residual_wandering <= params.tol;
  report.pass_span = largest > 0.0 && report.span_defect >= report.span_threshold;
  return report;
}

struct BuildResult {
  BandedOperator unitary;
  EquivalenceReport report;
  int col_range = 0;
  /// Margin whose interior rows and columns are fully determined by the
  /// assembled columns.
  int reliable_margin = 0;
};

/// Assembles U from its zeroth column:
///   U_{i+n,n}  = W_{n,i} U_{i,0} V_n*          (n >= 1),
///   U_{i-n,-n} = W_{-n,i}* U_{i,0} V_{-n}      (n >= 1),
/// with V_n, W_{n,i} the unitary polar factors of S_n...S_1, T_{i+n}...T_{i+1}
/// and V_{-n}, W_{-n,i} those of S_0...S_{-n+1}, T_i...T_{i-n+1}. The column
/// range is clipped so every assembled block lies in the window. Refuses with
/// PreconditionFailed unless verify_u0 passes at n_max = col_range.
inline BuildResult build_unitary_detailed(const ColumnIsometry& u0, const WeightSequence& s, const WeightSequence& t,
                                          int window, int col_range, double tol = kDefaultTol) {
  detail::require_same_dim(s, t);
  if (col_range < 1) throw Error(ErrorKind::InvalidArgument, "col_range must be >= 1");
  const int fit = std::min(window - u0.max_row(), window + u0.min_row());
  const int range = std::min(col_range, fit);
  if (range < 1) {
    throw Error(ErrorKind::WindowTooSmall, "column support leaves no room for a column range inside the window");
  }

  VerifyParams params;
  params.n_max = range;
  params.window = window;
  params.margin = std::min(range, window - 1);
  params.tol = tol;
  EquivalenceReport report = verify_u0(u0, s, t, params);
  if (!report.passed()) {
    throw VerificationError(ErrorKind::PreconditionFailed, "zeroth column fails verification", report);
  }

  BandedOperator u(s.dim(), window);
  for (const auto& [row, b] : u0.support()) u.set(row, 0, b);
  for (int n = 1; n <= range; ++n) {
    const CMatrix v_pos = polar_decompose(forward_product(s, 0, n)).factor;
    const CMatrix v_neg = polar_decompose(forward_product(s, -n, n)).factor;
    for (const auto& [row, b] : u0.support()) {
      const CMatrix w_pos = polar_decompose(forward_product(t, row, n)).factor;
      u.set(row + n, n, w_pos * b * v_pos.adjoint());
      const CMatrix w_neg = polar_decompose(forward_product(t, row - n, n)).factor;
      u.set(row - n, -n, w_neg.adjoint() * b * v_neg);
    }
  }

  const int row_reach = std::min(range - u0.max_row(), range + u0.min_row());
  const int reliable = std::max(window - range, window - std::max(row_reach, 0));
  return {std::move(u), std::move(report), range, std::min(reliable, window)};
}

inline BandedOperator build_unitary(const ColumnIsometry& u0, const WeightSequence& s, const WeightSequence& t,
                                    int window, int col_range, double tol = kDefaultTol) {
  return build_unitary_detailed(u0, s, t, window, col_range, tol).unitary;
}

struct DiagonalCheckReport {
  int p = 0;
  int n_max = 0;
  double residual_forward = 0.0;
  double residual_backward = 0.0;
  double tol = kDefaultTol;
  bool pass = false;
  double max_residual() const noexcept { return std::max(residual_forward, residual_backward); }
};

/// Diagonal-form test at offset p with block U_{p,0}:
///   |S_n...S_1| = U*_{p,0} |T_{p+n}...T_{p+1}| U_{p,0},
///   |S*_{-n+1}...S*_0| = U*_{p,0} |T*_{p-n+1}...T*_p| U_{p,0},  n <= n_max.
inline DiagonalCheckReport diagonal_unitary_check(const WeightSequence& s, const WeightSequence& t, int p,
                                                  const CMatrix& up0, int n_max, double tol = kDefaultTol) {
  detail::require_same_dim(s, t);
  require_square(up0, s.dim(), "U_{p,0}");
  if (!is_unitary(up0, tol)) throw Error(ErrorKind::NotUnitary, "U_{p,0} is not unitary");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  DiagonalCheckReport out;
  out.p = p;
  out.n_max = n_max;
  out.tol = tol;
  for (int n = 1; n <= n_max; ++n) {
    const CMatrix ps = modulus_product(s, 0, n);
    const CMatrix pt = modulus_product(t, p, n);
    out.residual_forward =
        std::max(out.residual_forward, detail::scaled_gap(ps, up0.adjoint() * pt * up0, ps, pt));
    const CMatrix qs = adjoint_modulus_product(s, 0, n);
    const CMatrix qt = adjoint_modulus_product(t, p, n);
    out.residual_backward =
        std::max(out.residual_backward, detail::scaled_gap(qs, up0.adjoint() * qt * up0, qs, qt));
  }
  out.pass = out.max_residual() <= tol;
  return out;
}

/// Unitaries mapping an eigenbasis of |S_1| onto an eigenbasis of |T_{p+1}|,
/// one per pairing of the eigenvectors (all pairings for m <= 4, the
/// eigenvalue-ordered one otherwise).
inline std::vector<CMatrix> diagonal_form_candidates(const WeightSequence& s, const WeightSequence& t, int p) {
  detail::require_same_dim(s, t);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(modulus(s.at(1)));
  Eigen::SelfAdjointEigenSolver<CMatrix> et(modulus(t.at(p + 1)));
  const CMatrix& v = es.eigenvectors();
  const CMatrix& w = et.eigenvectors();
  const Eigen::Index m = s.dim();
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<CMatrix> out;
  do {
    CMatrix u = zeros(m);
    for (Eigen::Index n = 0; n < m; ++n) u += w.col(perm[static_cast<std::size_t>(n)]) * v.col(n).adjoint();
    out.push_back(std::move(u));
  } while (m <= 4 && std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Solves X |S_n...S_1| = |T_{p+n}...T_{p+1}| X and the backward analogue for
/// n <= n_max as a linear system and returns the unitary polar factor of a
/// generic solution. Since the moduli are Hermitian, X* X commutes with every
/// |S|-product, so that factor satisfies the same relations. std::nullopt when
/// the solution space contains no invertible element.
inline std::optional<CMatrix> solve_diagonal_block(const WeightSequence& s, const WeightSequence& t, int p, int n_max,
                                                   double rel_tol = 1e-9) {
  detail::require_same_dim(s, t);
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const Eigen::Index m = s.dim();
  const Eigen::Index mm = m * m;
  const CMatrix id = identity(m);
  CMatrix system(2 * n_max * mm, mm);
  Eigen::Index r = 0;
  const auto add = [&](const CMatrix& a, const CMatrix& b) {
    // vec(X A - B X) = (A^T kron I - I kron B) vec(X)
    CMatrix block(mm, mm);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) block.block(i * m, j * m, m, m) = a(j, i) * id - (i == j ? b : zeros(m));
    }
    const double scale = std::max(spectral_norm(a), spectral_norm(b));
    system.middleRows(r, mm) = block / scale;
    r += mm;
  };
  for (int n = 1; n <= n_max; ++n) {
    add(modulus_product(s, 0, n), modulus_product(t, p, n));
    add(adjoint_modulus_product(s, 0, n), adjoint_modulus_product(t, p, n));
  }
  Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = rel_tol * std::max(sv(0), 1.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  if (rank == mm) return std::nullopt;
  // fixed, irrational-looking weights make an accidental singular combination unlikely
  CVector x = CVector::Zero(mm);
  for (Eigen::Index k = rank; k < mm; ++k) {
    const double w = 1.0 + std::sqrt(2.0) * static_cast<double>(k - rank);
    x += Complex(std::cos(w), std::sin(w)) * svd.matrixV().col(k) / w;
  }
  const CMatrix xm = Eigen::Map<const CMatrix>(x.data(), m, m);
  if (!is_invertible(xm, 1e-8)) return std::nullopt;
  return polar_decompose(xm).factor;
}

struct SpectraReport {
  int p = 0;
  int lo = 0;
  int hi = 0;
  double max_deviation = 0.0;
  int worst_index = 0;
  double tol = kDefaultTol;
  bool pass = false;
};

/// Compares the sorted singular values of S_i and T_{i+p} for lo <= i <= hi.
/// A failure rules out diagonal-form equivalence at offset p.
inline SpectraReport spectra_necessary_check(const WeightSequence& s, const WeightSequence& t, int p, int lo, int hi,
                                             double tol = kDefaultTol) {
  detail::require_same_dim(s, t);
  SpectraReport out;
  out.p = p;
  out.lo = lo;
  out.hi = hi;
  out.tol = tol;
  out.worst_index = lo;
  for (int i = lo; i <= hi; ++i) {
    const RVector a = singular_values(s.at(i));
    const RVector b = singular_values(t.at(i + p));
    const double dev = (a - b).cwiseAbs().maxCoeff() / std::max(a(0), b(0));
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.worst_index = i;
    }
  }
  out.pass = out.max_deviation <= tol;
  return out;
}

struct PolarFactorReport {
  double r0 = 0.0;  // U S = T U
  double r1 = 0.0;  // U |S| = |T| U
  double r2 = 0.0;  // U V_S = V_T U
  double tol = kDefaultTol;
  bool intertwines = false;
  bool polar_conditions = false;
  bool agree = false;
};

/// Evaluates U S = T U against the pair U|S| = |T|U, U V_S = V_T U on interior
/// blocks; the two verdicts must coincide for unitary U.
inline PolarFactorReport polar_factor_check(const BandedOperator& u, const WeightSequence& s, const WeightSequence& t,
                                            int margin, double tol = kDefaultTol) {
  detail::require_same_dim(s, t);
  if (u.dim() != s.dim()) throw Error(ErrorKind::DimensionMismatch, "operator and weights differ in dimension");
  const double defect = unitarity_residual(u, margin);
  if (defect > tol) throw Error(ErrorKind::NotUnitary, "U is not unitary on the interior (" + std::to_string(defect) + ")");

  const auto [vs, ms] = shift_polar(s);
  const auto [vt, mt] = shift_polar(t);
  const Interior in = interior_of(u, margin);
  std::set<BandedOperator::Key> anchors;
  for (const auto& [key, b] : u.blocks()) {
    anchors.insert(key);
    anchors.insert({key.first + 1, key.second});
    anchors.insert({key.first, key.second - 1});
  }
  double r1 = 0.0;
  double r2 = 0.0;
  for (const auto& [a, b] : anchors) {
    if (!in.contains(a) || !in.contains(b)) continue;
    const CMatrix blk = u.block(a, b);
    // (U D[|S_{i+1}|])_{a,b} - (D[|T_{i+1}|] U)_{a,b}
    r1 = std::max(r1, (blk * ms.at(b + 1) - mt.at(a + 1) * blk).norm());
    if (in.contains(a - 1) && in.contains(b + 1)) {
      // (U V_S)_{a,b} = U_{a,b+1} V_{b+1};  (V_T U)_{a,b} = V_a U_{a-1,b}
      r2 = std::max(r2, (u.block(a, b + 1) * vs.at(b + 1) - vt.at(a) * u.block(a - 1, b)).norm());
    }
  }
  const double unorm = std::max(u.max_block_norm(), 1.0);
  PolarFactorReport out;
  out.tol = tol;
  out.r0 = intertwining_residual(u, s, t, 1, margin);
  out.r1 = r1 / (unorm * std::max(s.sup_norm(), t.sup_norm()));
  out.r2 = r2 / unorm;
  out.intertwines = out.r0 <= tol;
  out.polar_conditions = out.r1 <= tol && out.r2 <= tol;
  out.agree = out.intertwines == out.polar_conditions;
  return out;
}

struct ToeplitzReport {
  double max_deviation = 0.0;
  bool constant = false;
};

/// max ||U_{i+1,j+1} - U_{i,j}||_F over interior blocks.
inline ToeplitzReport constant_on_diagonals_check(const BandedOperator& u, int margin, double tol = kDefaultTol) {
  const Interior in = interior_of(u, margin);
  std::set<BandedOperator::Key> anchors;
  for (const auto& [key, b] : u.blocks()) {
    anchors.insert(key);
    anchors.insert({key.first - 1, key.second - 1});
  }
  ToeplitzReport out;
  for (const auto& [i, j] : anchors) {
    if (!in.contains(i) || !in.contains(j) || !in.contains(i + 1) || !in.contains(j + 1)) continue;
    out.max_deviation = std::max(out.max_deviation, (u.block(i + 1, j + 1) - u.block(i, j)).norm());
  }
  out.constant = out.max_deviation <= tol;
  return out;
}

}  // namespace wshift
