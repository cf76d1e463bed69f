#pragma once

#include <Eigen/Dense>

#include "gaussot/error.hpp"

namespace gaussot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultMinEigTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-10;

// Dense real symmetric matrix. Construction symmetrizes as (A + A^T) / 2, which
// makes the stored entries bit-symmetric.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& entries);

  static SymMatrix identity(Index dim);
  static SymMatrix diagonal(const Vector& diag);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Eigenvalues sorted in descending order, eigenvectors as columns. Each column
// is sign-normalized so that its largest-magnitude entry (lowest row on ties)
// is nonnegative. Equal eigenvalues keep the backend's relative order.
struct EigenSystem {
  Vector values;
  Matrix vectors;
};

EigenSystem sym_eigen(const SymMatrix& a);

// Symmetric matrix whose smallest eigenvalue is >= -min_eig_tol * max(1, largest).
class PsdMatrix {
 public:
  explicit PsdMatrix(SymMatrix base, double min_eig_tol = kDefaultMinEigTol);
  explicit PsdMatrix(const Matrix& entries, double min_eig_tol = kDefaultMinEigTol)
      : PsdMatrix(SymMatrix(entries), min_eig_tol) {}

  Index dim() const noexcept { return base_.dim(); }
  const SymMatrix& sym() const noexcept { return base_; }
  const Matrix& matrix() const noexcept { return base_.matrix(); }
  double operator()(Index i, Index j) const { return base_(i, j); }
  double min_eig_tol() const noexcept { return min_eig_tol_; }
  const EigenSystem& eigen() const noexcept { return eigen_; }

  // Strictly positive definite relative to rank_tol.
  bool is_invertible(double rank_tol = kDefaultRankTol) const;

 private:
  SymMatrix base_;
  double min_eig_tol_;
  EigenSystem eigen_;
};

// Symmetric PSD square root. Eigenvalues in [-tol * scale, 0) are clamped to 0.
PsdMatrix sqrt_psd(const PsdMatrix& s);

// (S^{-1})^{1/2}; throws SingularMatrix unless the smallest eigenvalue exceeds
// rank_tol * largest.
SymMatrix inv_sqrt_psd(const PsdMatrix& s, double rank_tol = kDefaultRankTol);

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;

  explicit operator bool() const noexcept { return psd; }
};

// True iff the smallest eigenvalue is >= -tol * max(1, largest eigenvalue).
PsdCheck is_psd(const SymMatrix& a, double tol);

}  // namespace gaussot
