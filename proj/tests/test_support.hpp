#pragma once

// Test-side oracles and generators, independent of the library's banded code.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "wshift/wshift.hpp"

#define EXPECT_ERROR_KIND(stmt, expected_kind)                                   \
  do {                                                                          \
    try {                                                                       \
      static_cast<void>(stmt);                                                  \
      ADD_FAILURE() << "expected " << ::wshift::to_string(expected_kind);      \
    } catch (const ::wshift::Error& e_) {                                       \
      EXPECT_EQ(e_.kind(), expected_kind) << e_.what();                         \
    }                                                                           \
  } while (0)

namespace wshift::testing {

using Rng = std::mt19937_64;

/// Q1 diag(s) Q2 with singular values in [lo, hi].
inline CMatrix random_invertible(Eigen::Index m, Rng& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  CMatrix d = CMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) d(i, i) = u(rng);
  return random_unitary(m, rng) * d * random_unitary(m, rng);
}

inline CMatrix random_positive(Eigen::Index m, Rng& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  const CMatrix q = random_unitary(m, rng);
  CMatrix d = CMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) d(i, i) = u(rng);
  return q * d * q.adjoint();
}

inline WeightSequence random_windowed(Eigen::Index m, int lo, int hi, Rng& rng) {
  std::vector<CMatrix> ws;
  for (int i = lo; i <= hi; ++i) ws.push_back(random_invertible(m, rng));
  return WeightSequence::windowed(m, lo, std::move(ws));
}

inline WeightSequence random_positive_windowed(Eigen::Index m, int lo, int hi, Rng& rng) {
  std::vector<CMatrix> ws;
  for (int i = lo; i <= hi; ++i) ws.push_back(random_positive(m, rng));
  return WeightSequence::windowed(m, lo, std::move(ws));
}

/// Dense (2N+1)m square finite section of the shift, built entry by entry.
inline CMatrix dense_shift(const WeightSequence& s, int window) {
  const Eigen::Index m = s.dim();
  const Eigen::Index size = (2 * window + 1) * m;
  CMatrix d = CMatrix::Zero(size, size);
  for (int i = -window + 1; i <= window; ++i) d.block((i + window) * m, (i - 1 + window) * m, m, m) = s.at(i);
  return d;
}

inline CMatrix dense_block(const CMatrix& d, Eigen::Index m, int window, int row, int col) {
  return d.block((row + window) * m, (col + window) * m, m, m);
}

inline CMatrix dense_power(const CMatrix& a, int n) {
  CMatrix out = CMatrix::Identity(a.rows(), a.cols());
  for (int k = 0; k < n; ++k) out = out * a;
  return out;
}

/// Principal square root of a positive semidefinite matrix via its own
/// eigendecomposition.
inline CMatrix psd_sqrt(const CMatrix& p) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (p + p.adjoint()));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// U = D[(Q_i)] F^p style fabrication: intertwining unitary with U_{i+p,i} = Q_i
/// and T_{i+p} = Q_i S_i Q_{i-1}*, so that T U = U S.
struct Fabricated {
  WeightSequence s;
  WeightSequence t;
  std::vector<CMatrix> q;  // Q_i for i in [qlo, qhi]
  int qlo;
  int p;
  CMatrix q_at(int i) const {
    if (i < qlo || i >= qlo + static_cast<int>(q.size())) return CMatrix::Identity(s.dim(), s.dim());
    return q[static_cast<std::size_t>(i - qlo)];
  }
};

inline Fabricated fabricate_diagonal_form(const WeightSequence& s, int p, int lo, int hi, Rng& rng) {
  Fabricated f{s, s, {}, lo, p};
  for (int i = lo; i <= hi; ++i) f.q.push_back(random_unitary(s.dim(), rng));
  const int tlo = std::min(s.first_index(), lo) + p - 1;
  const int thi = std::max(s.last_index(), hi) + p + 1;
  std::vector<CMatrix> tw;
  for (int j = tlo; j <= thi; ++j) {
    const int i = j - p;
    tw.push_back(f.q_at(i) * s.at(i) * f.q_at(i - 1).adjoint());
  }
  f.t = WeightSequence::windowed(s.dim(), tlo, std::move(tw));
  return f;
}

}  // namespace wshift::testing
