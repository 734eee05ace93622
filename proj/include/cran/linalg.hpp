#pragma once

// Hermitian linear-algebra helpers shared across the library: symmetrization,
// base-2 log-determinants, matrix square roots, and Loewner-interval
// projections. All information quantities downstream are in bits, so every
// log here is base 2.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace cran {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kHermTol = 1e-12;

inline double log2e() { return 1.4426950408889634074; }

/// (A + A^dagger)/2. Throws if the asymmetry is beyond tol relative to scale.
inline Matrix hermitize(const Matrix& a, double tol = 1e-9) {
  Matrix h = 0.5 * (a + a.adjoint());
  double scale = std::max(1.0, h.norm());
  if ((a - h).norm() > tol * scale) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
  return h;
}

inline Eigen::VectorXd herm_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& a) {
  return herm_eigenvalues(a).minCoeff();
}

inline bool is_psd(const Matrix& a, double tol = 1e-9) {
  if (a.rows() == 0) return true;
  double scale = std::max(1.0, a.norm());
  return min_eigenvalue(a) >= -tol * scale;
}

inline bool is_pd(const Matrix& a, double tol = 1e-12) {
  if (a.rows() == 0) return false;
  return min_eigenvalue(a) > tol;
}

/// log2 det of a Hermitian positive-definite matrix. Cholesky first,
/// eigenvalue fallback for near-singular input. Returns -inf if the matrix
/// is singular or indefinite beyond tolerance.
inline double logdet2(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    double s = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log2(std::real(l(i, i)));
    return 2.0 * s;
  }
  // Fallback: eigenvalues of the symmetrized argument.
  Eigen::VectorXd ev = herm_eigenvalues(0.5 * (a + a.adjoint()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= 0.0) return -kInf;
    s += std::log2(ev(i));
  }
  return s;
}

/// Hermitian square root via eigendecomposition; negative eigenvalues within
/// tolerance are clamped to zero.
inline Matrix herm_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Inverse Hermitian square root (eigenvalues must be strictly positive).
inline Matrix herm_inv_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw std::invalid_argument("herm_inv_sqrt: matrix not positive definite");
  }
  Eigen::VectorXd inv = ev.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Eigenvalue clip of a Hermitian matrix to [lo, hi].
inline Matrix clip_eigenvalues(const Matrix& a, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace cran
