#include "gaussot/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/linalg.hpp"

namespace gaussot {

namespace {

double eigen_scale(const Vector& values) {
  return values.size() == 0 ? 1.0 : std::max(1.0, values(0));
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols()) {
    throw Error(ErrorKind::InvalidInput, "matrix is " + std::to_string(entries.rows()) + "x" +
                                             std::to_string(entries.cols()) + ", expected square");
  }
  if (entries.rows() == 0) throw Error(ErrorKind::InvalidInput, "matrix has dimension 0");
  if (!entries.allFinite()) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  entries_ = detail::symmetrized<double>(entries);
}

SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

EigenSystem sym_eigen(const SymMatrix& a) {
  auto pair = detail::canonical_eigen<double>(a.matrix());
  return EigenSystem{std::move(pair.values), std::move(pair.vectors)};
}

PsdMatrix::PsdMatrix(SymMatrix base, double min_eig_tol)
    : base_(std::move(base)), min_eig_tol_(min_eig_tol), eigen_(sym_eigen(base_)) {
  if (!(min_eig_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "min_eig_tol must be >= 0");
  const double smallest = eigen_.values(eigen_.values.size() - 1);
  if (smallest < -min_eig_tol_ * eigen_scale(eigen_.values)) {
    throw Error(ErrorKind::NotPsd, "smallest eigenvalue " + std::to_string(smallest) +
                                       " is below tolerance");
  }
}

bool PsdMatrix::is_invertible(double rank_tol) const {
  const double largest = eigen_.values(0);
  const double smallest = eigen_.values(eigen_.values.size() - 1);
  return smallest > rank_tol * largest && smallest > 0.0;
}

PsdMatrix sqrt_psd(const PsdMatrix& s) {
  const EigenSystem& e = s.eigen();
  const double floor = -s.min_eig_tol() * eigen_scale(e.values);
  // Eigenvalues within rounding of zero are taken as zero before the root.
  const double zero_floor = detail::roundoff_floor(s.dim()) * e.values.cwiseAbs().maxCoeff();
  Vector roots(e.values.size());
  for (Index i = 0; i < roots.size(); ++i) {
    const double v = e.values(i);
    if (v < floor) throw Error(ErrorKind::NotPsd, "eigenvalue " + std::to_string(v) + " below tolerance");
    roots(i) = v > zero_floor ? std::sqrt(v) : 0.0;
  }
  Matrix r = e.vectors * roots.asDiagonal() * e.vectors.transpose();
  return PsdMatrix(SymMatrix(r), s.min_eig_tol());
}

SymMatrix inv_sqrt_psd(const PsdMatrix& s, double rank_tol) {
  if (!s.is_invertible(rank_tol)) {
    throw Error(ErrorKind::SingularMatrix,
                "smallest eigenvalue " + std::to_string(s.eigen().values.tail(1)(0)) +
                    " is not above rank_tol * largest");
  }
  const EigenSystem& e = s.eigen();
  Vector inv_roots = e.values.cwiseSqrt().cwiseInverse();
  Matrix r = e.vectors * inv_roots.asDiagonal() * e.vectors.transpose();
  return SymMatrix(r);
}

PsdCheck is_psd(const SymMatrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NumericalInconsistency, "eigensolver did not converge");
  const Vector& values = solver.eigenvalues();  // ascending
  const double smallest = values(0);
  return PsdCheck{smallest >= -tol * std::max(1.0, values(values.size() - 1)), smallest};
}

}  // namespace gaussot
