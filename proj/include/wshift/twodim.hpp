#pragma once

// Two-diagonal equivalence on C^2 for positive, commuting weights with two
// distinct eigenvalues.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wshift/equivalence.hpp"

namespace wshift {

/// How eigenvalues extend outside the stored window.
enum class EigenPadding { None, Identity, Periodic };

/// Common orthonormal eigenbasis (v_1, v_2) of a family of 2 x 2 weights and the
/// eigenvalue branches lambda_{k,j} with S_k v_j = lambda_{k,j} v_j.
struct EigenData {
  CMatrix basis;                             // columns v_1, v_2
  int lo = 0;                                // index of values[0]
  std::vector<std::array<double, 2>> values;  // lambda_{lo + r, j}
  EigenPadding padding = EigenPadding::None;

  int hi() const noexcept { return lo + static_cast<int>(values.size()) - 1; }

  CVector vector(int branch) const { return basis.col(branch); }

  std::optional<double> eigenvalue(int k, int branch) const {
    const int len = static_cast<int>(values.size());
    if (k >= lo && k <= hi()) return values[static_cast<std::size_t>(k - lo)][static_cast<std::size_t>(branch)];
    switch (padding) {
      case EigenPadding::Identity: return 1.0;
      case EigenPadding::Periodic: {
        const int r = (((k - lo) % len) + len) % len;
        return values[static_cast<std::size_t>(r)][static_cast<std::size_t>(branch)];
      }
      case EigenPadding::None: break;
    }
    return std::nullopt;
  }
};

/// sigma: branch bijection {0,1} -> {0,1}; tau: row offset per branch.
struct SigmaTau {
  std::array<int, 2> sigma{0, 1};
  std::array<int, 2> tau{0, 0};

  bool is_identity_sigma() const noexcept { return sigma[0] == 0; }
  bool operator==(const SigmaTau&) const = default;
};

struct EigenOptions {
  double tol = kDefaultTol;
  double comm_tol = kDefaultTol;
  double gap = 1e-6;  // relative eigenvalue gap
};

namespace detail {

/// Largest-magnitude component made real and positive.
inline CVector fix_phase(CVector v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const Complex z = v(idx);
  return v * (std::abs(z) / z);
}

/// Label order of two orthonormal vectors: the one with the larger first
/// component comes first, so diagonal inputs keep the standard order (e_1, e_2).
inline bool dominant_first(const CVector& a, const CVector& b) { return std::abs(a(0)) >= std::abs(b(0)); }

}  // namespace detail

/// Simultaneous diagonalization of positive, pairwise commuting 2 x 2 weights.
/// The basis comes from the first weight whose relative gap reaches
/// options.gap; branch j is the one carried by basis column j.
inline EigenData common_eigenbasis(std::span<const CMatrix> weights, int first_index,
                                   EigenPadding padding = EigenPadding::None, const EigenOptions& options = {}) {
  if (weights.empty()) throw Error(ErrorKind::InvalidArgument, "common_eigenbasis needs at least one weight");
  for (std::size_t a = 0; a < weights.size(); ++a) {
    require_square(weights[a], 2, "common_eigenbasis");
    if (!is_positive_definite(weights[a], options.tol)) {
      throw Error(ErrorKind::InvalidArgument, "weight at index " + std::to_string(first_index + static_cast<int>(a)) +
                                                  " is not positive definite");
    }
  }
  for (std::size_t a = 0; a < weights.size(); ++a) {
    for (std::size_t b = a + 1; b < weights.size(); ++b) {
      const double comm = (weights[a] * weights[b] - weights[b] * weights[a]).norm();
      if (comm > options.comm_tol * weights[a].norm() * weights[b].norm()) {
        throw Error(ErrorKind::NotCommuting, "weights at indices " + std::to_string(first_index + static_cast<int>(a)) +
                                                 " and " + std::to_string(first_index + static_cast<int>(b)) +
                                                 " do not commute");
      }
    }
  }

  std::optional<std::size_t> separating;
  for (std::size_t a = 0; a < weights.size() && !separating; ++a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(weights[a], Eigen::EigenvaluesOnly);
    const RVector& ev = es.eigenvalues();
    if (ev(1) - ev(0) >= options.gap * ev(1)) separating = a;
  }
  if (!separating) throw Error(ErrorKind::DegenerateSpectrum, "no weight separates the eigenvectors");

  Eigen::SelfAdjointEigenSolver<CMatrix> es(weights[*separating]);
  EigenData out;
  out.basis = CMatrix(2, 2);
  CVector v0 = detail::fix_phase(es.eigenvectors().col(0));
  CVector v1 = detail::fix_phase(es.eigenvectors().col(1));
  if (!detail::dominant_first(v0, v1)) std::swap(v0, v1);
  out.basis.col(0) = v0;
  out.basis.col(1) = v1;
  out.lo = first_index;
  out.padding = padding;
  out.values.reserve(weights.size());
  for (std::size_t a = 0; a < weights.size(); ++a) {
    std::array<double, 2> lam{};
    for (int j = 0; j < 2; ++j) {
      const CVector v = out.basis.col(j);
      lam[static_cast<std::size_t>(j)] = v.dot(weights[a] * v).real();
      if ((weights[a] * v - lam[static_cast<std::size_t>(j)] * v).norm() > options.tol * weights[a].norm()) {
        throw Error(ErrorKind::NotCommuting, "basis vector " + std::to_string(j + 1) + " is not an eigenvector of weight " +
                                                 std::to_string(first_index + static_cast<int>(a)));
      }
    }
    if (std::abs(lam[0] - lam[1]) < options.gap * std::max(lam[0], lam[1])) {
      throw Error(ErrorKind::DegenerateSpectrum,
                  "weight at index " + std::to_string(first_index + static_cast<int>(a)) + " has a repeated eigenvalue");
    }
    out.values.push_back(lam);
  }
  return out;
}

/// Eigen data of the stored part of a weight sequence, padding per its kind.
inline EigenData common_eigenbasis(const WeightSequence& seq, const EigenOptions& options = {}) {
  const auto& ws = seq.stored();
  return common_eigenbasis(std::span<const CMatrix>(ws.data(), ws.size()), seq.first_index(),
                           seq.is_periodic() ? EigenPadding::Periodic : EigenPadding::Identity, options);
}

/// Exhaustive search over sigma in {id, swap} and tau in [-tau_range, tau_range]^2
/// for lambda^S_{k,j} = lambda^T_{tau(j)+k, sigma(j)} on every k where either
/// side departs from its padding. Preference: identity sigma, then smaller
/// max |tau|, then smaller |tau_1| + |tau_2|, then lexicographic tau.
/// std::nullopt is inconclusive: no match exists within the range.
inline std::optional<SigmaTau> match_sigma_tau(const EigenData& sdata, const EigenData& tdata, int tau_range,
                                               double tol = kDefaultTol) {
  if (tau_range < 0) throw Error(ErrorKind::InvalidArgument, "tau_range must be non-negative");
  const auto span_len = [](const EigenData& d) { return static_cast<int>(d.values.size()); };
  int extra = 0;
  if (sdata.padding == EigenPadding::Periodic || tdata.padding == EigenPadding::Periodic) {
    extra = span_len(sdata) * span_len(tdata);
  }
  const int k_lo = std::min(sdata.lo, tdata.lo - tau_range) - extra;
  const int k_hi = std::max(sdata.hi(), tdata.hi() + tau_range) + extra;

  const auto close = [tol](double a, double b) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); };
  const auto branch_matches = [&](int j, int target, int shift) {
    for (int k = k_lo; k <= k_hi; ++k) {
      const auto ls = sdata.eigenvalue(k, j);
      if (!ls) continue;
      const auto lt = tdata.eigenvalue(shift + k, target);
      if (!lt || !close(*ls, *lt)) return false;
    }
    return true;
  };

  std::vector<int> taus;
  for (int t = -tau_range; t <= tau_range; ++t) taus.push_back(t);
  std::sort(taus.begin(), taus.end(), [](int a, int b) { return std::make_pair(std::abs(a), a) < std::make_pair(std::abs(b), b); });

  for (const std::array<int, 2> sigma : {std::array<int, 2>{0, 1}, std::array<int, 2>{1, 0}}) {
    std::vector<int> ok0;
    std::vector<int> ok1;
    for (int t : taus) {
      if (branch_matches(0, sigma[0], t)) ok0.push_back(t);
      if (branch_matches(1, sigma[1], t)) ok1.push_back(t);
    }
    std::optional<SigmaTau> best;
    auto rank = [](const SigmaTau& st) {
      return std::make_tuple(std::max(std::abs(st.tau[0]), std::abs(st.tau[1])),
                             std::abs(st.tau[0]) + std::abs(st.tau[1]), st.tau[0], st.tau[1]);
    };
    for (int a : ok0) {
      for (int b : ok1) {
        const SigmaTau cand{sigma, {a, b}};
        if (!best || rank(cand) < rank(*best)) best = cand;
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

/// Zeroth column with V_{i,0} x = sum_{l : tau(l) = i} <x, v_l> w_{sigma(l)}.
inline ColumnIsometry two_diagonal_column(const SigmaTau& st, const EigenData& sdata, const EigenData& tdata) {
  std::vector<ColumnBlock> blocks;
  for (int l = 0; l < 2; ++l) {
    const CMatrix piece = tdata.vector(st.sigma[static_cast<std::size_t>(l)]) * sdata.vector(l).adjoint();
    const int row = st.tau[static_cast<std::size_t>(l)];
    auto it = std::find_if(blocks.begin(), blocks.end(), [row](const auto& b) { return b.row == row; });
    if (it == blocks.end()) {
      blocks.push_back({row, piece});
    } else {
      it->block += piece;
    }
  }
  return ColumnIsometry(2, std::move(blocks));
}

struct TwoDiagonalResult {
  ColumnIsometry column;
  BuildResult build;
  std::set<int> support;
};

/// Builds the two-diagonal intertwining unitary from a (sigma, tau) match.
/// Throws VerificationFailed (with the report) when the column does not verify
/// or the result has more than two diagonals.
inline TwoDiagonalResult construct_two_diagonal_unitary(const WeightSequence& s, const WeightSequence& t,
                                                        const SigmaTau& st, const EigenData& sdata,
                                                        const EigenData& tdata, int window, double tol = kDefaultTol) {
  if (s.dim() != 2 || t.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "two-diagonal construction needs m = 2");
  ColumnIsometry column = two_diagonal_column(st, sdata, tdata);
  BuildResult build = [&] {
    try {
      return build_unitary_detailed(column, s, t, window, window, tol);
    } catch (const VerificationError& e) {
      throw VerificationError(ErrorKind::VerificationFailed, e.what(), e.report());
    }
  }();
  std::set<int> support = diagonal_support(build.unitary, tol);
  if (support.size() > 2) {
    throw VerificationError(ErrorKind::VerificationFailed,
                            "constructed unitary has " + std::to_string(support.size()) + " diagonals", build.report);
  }
  return {std::move(column), std::move(build), std::move(support)};
}

}  // namespace wshift
