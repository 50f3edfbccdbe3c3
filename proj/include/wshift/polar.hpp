#pragma once

#include <string>

#include "wshift/matrix.hpp"

namespace wshift {

/// Polar factorization M = factor * modulus of an invertible square matrix.
struct PolarPair {
  CMatrix factor;   // unitary
  CMatrix modulus;  // (M* M)^{1/2}, positive definite
};

namespace detail {

struct HermitianRoot {
  CMatrix eigenvectors;
  RVector roots;  // square roots of the eigenvalues of M* M, ascending
};

inline HermitianRoot gram_root(const CMatrix& m, double eps) {
  const CMatrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gram + gram.adjoint()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularModulus, "eigendecomposition of M*M did not converge");
  }
  RVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double largest = roots.size() ? roots(roots.size() - 1) : 0.0;
  if (largest <= 0.0 || roots(0) <= eps * largest) {
    throw Error(ErrorKind::SingularModulus,
                "smallest singular value " + std::to_string(roots.size() ? roots(0) : 0.0) +
                    " is below " + std::to_string(eps) + " x largest " + std::to_string(largest));
  }
  return {es.eigenvectors(), std::move(roots)};
}

}  // namespace detail

/// |M| = (M* M)^{1/2}. Throws SingularModulus when M is numerically singular.
inline CMatrix modulus(const CMatrix& m, double eps = kInvertibilityEps) {
  if (!is_square(m)) throw Error(ErrorKind::DimensionMismatch, "modulus of a non-square matrix");
  const auto root = detail::gram_root(m, eps);
  const CMatrix& q = root.eigenvectors;
  CMatrix p = q * root.roots.cast<Complex>().asDiagonal() * q.adjoint();
  return 0.5 * (p + p.adjoint());
}

/// Polar decomposition through the eigendecomposition of M* M.
///
/// The unitary factor is M |M|^{-1}. When its unitarity defect exceeds 1e-12 it
/// is polished by one Newton step X <- (X + X^{-*}) / 2, which converges
/// quadratically to the same unitary polar factor.
inline PolarPair polar_decompose(const CMatrix& m, double eps = kInvertibilityEps) {
  if (!is_square(m)) throw Error(ErrorKind::DimensionMismatch, "polar decomposition of a non-square matrix");
  const auto root = detail::gram_root(m, eps);
  const CMatrix& q = root.eigenvectors;
  const auto roots = root.roots.cast<Complex>();

  CMatrix mod = q * roots.asDiagonal() * q.adjoint();
  mod = 0.5 * (mod + mod.adjoint());
  CMatrix factor = m * (q * roots.cwiseInverse().asDiagonal() * q.adjoint());

  if (unitarity_defect(factor) > 1e-12) {
    const CMatrix inv_adj = factor.adjoint().inverse();
    factor = 0.5 * (factor + inv_adj);
  }
  return {std::move(factor), std::move(mod)};
}

}  // namespace wshift
