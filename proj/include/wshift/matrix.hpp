#pragma once

// Dense complex matrix primitives on C^m.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "wshift/errors.hpp"

namespace wshift {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Relative threshold on the smallest singular value below which a weight is
/// treated as singular.
inline constexpr double kInvertibilityEps = 1e-10;

/// Default tolerance of relative-Frobenius comparisons.
inline constexpr double kDefaultTol = 1e-8;

inline CMatrix identity(Eigen::Index m) { return CMatrix::Identity(m, m); }

inline CMatrix zeros(Eigen::Index m) { return CMatrix::Zero(m, m); }

inline CMatrix diag(std::initializer_list<Complex> entries) {
  CVector d(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const auto& e : entries) d(i++) = e;
  return d.asDiagonal();
}

inline bool is_finite(const CMatrix& a) {
  return a.unaryExpr([](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); })
      .all();
}

/// Singular values in descending order.
inline RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector();
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

/// ||a - b||_F / max(||a||_F, ||b||_F); zero when both vanish.
inline double relative_difference(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

inline bool is_square(const CMatrix& a) { return a.rows() == a.cols(); }

inline double unitarity_defect(const CMatrix& a) {
  const auto m = a.cols();
  return (a.adjoint() * a - identity(m)).norm() / std::sqrt(static_cast<double>(m));
}

inline bool is_unitary(const CMatrix& a, double tol = kDefaultTol) {
  return is_square(a) && unitarity_defect(a) <= tol;
}

inline bool is_hermitian(const CMatrix& a, double tol = kDefaultTol) {
  return is_square(a) && relative_difference(a, a.adjoint()) <= tol;
}

inline bool is_positive_semidefinite(const CMatrix& a, double tol = kDefaultTol) {
  if (!is_hermitian(a, tol)) return false;
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return ev.minCoeff() >= -tol * scale;
}

inline bool is_positive_definite(const CMatrix& a, double tol = kDefaultTol) {
  if (!is_hermitian(a, tol)) return false;
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  return ev.maxCoeff() > 0.0 && ev.minCoeff() > tol * ev.maxCoeff();
}

/// Smallest singular value exceeds tol times the largest.
inline bool is_invertible(const CMatrix& a, double tol = kInvertibilityEps) {
  if (!is_square(a) || a.size() == 0) return false;
  const RVector s = singular_values(a);
  return s(0) > 0.0 && s(s.size() - 1) > tol * s(0);
}

inline void require_square(const CMatrix& a, Eigen::Index m, const char* what) {
  if (a.rows() != m || a.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(m) + "x" + std::to_string(m) +
                    " block, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace wshift
