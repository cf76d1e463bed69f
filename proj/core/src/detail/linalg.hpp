#pragma once

// Scalar-generic symmetric kernels shared by the public double API and the
// quad-precision paths used for the Wasserstein closed forms and frame solver.

#include <Eigen/Dense>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace Eigen {

// Boost ships a NumTraits specialization that predates Eigen 3.4 (no
// infinity/quiet_NaN); this one is self-contained.
template <>
struct NumTraits<boost::multiprecision::float128>
    : GenericNumTraits<boost::multiprecision::float128> {
  using Q = boost::multiprecision::float128;
  using Real = Q;
  using NonInteger = Q;
  using Literal = Q;
  using Nested = Q;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static Q epsilon() { return std::numeric_limits<Q>::epsilon(); }
  static Q dummy_precision() { return Q(1e-28); }
  static Q highest() { return (std::numeric_limits<Q>::max)(); }
  static Q lowest() { return std::numeric_limits<Q>::lowest(); }
  static int digits10() { return std::numeric_limits<Q>::digits10; }
  static Q infinity() { return std::numeric_limits<Q>::infinity(); }
  static Q quiet_NaN() { return std::numeric_limits<Q>::quiet_NaN(); }
};

}  // namespace Eigen

namespace gaussot::detail {

using Extended = boost::multiprecision::float128;

template <class T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixX = MatrixT<Extended>;
using VectorX = VectorT<Extended>;

template <class T>
struct EigenPair {
  VectorT<T> values;   // descending
  MatrixT<T> vectors;  // columns, canonical sign
};

template <class T>
MatrixT<T> symmetrized(const MatrixT<T>& a) {
  MatrixT<T> s = a + a.transpose();
  s /= T(2);
  return s;
}

template <class T>
EigenPair<T> canonical_eigen(const MatrixT<T>& a) {
  const Eigen::Index n = a.rows();
  Eigen::SelfAdjointEigenSolver<MatrixT<T>> solver(a);
  const VectorT<T>& ascending = solver.eigenvalues();
  const MatrixT<T>& vecs = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return ascending(l) > ascending(r);
  });

  EigenPair<T> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = ascending(src);
    VectorT<T> col = vecs.col(src);
    Eigen::Index lead = 0;
    T best = T(-1);
    for (Eigen::Index r = 0; r < n; ++r) {
      const T mag = col(r) < T(0) ? T(-col(r)) : col(r);
      if (mag > best) {
        best = mag;
        lead = r;
      }
    }
    if (col(lead) < T(0)) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

template <class T, class F>
MatrixT<T> spectral_apply(const EigenPair<T>& e, F&& f) {
  VectorT<T> mapped(e.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(e.values(i));
  MatrixT<T> out = e.vectors * mapped.asDiagonal() * e.vectors.transpose();
  return symmetrized<T>(out);
}

// Square root with every eigenvalue at or below `floor` treated as zero.
// Callers validate PSD-ness beforehand; this only absorbs roundoff.
template <class T>
MatrixT<T> sqrt_clamped(const EigenPair<T>& e, const T& floor = T(0)) {
  using std::sqrt;
  return spectral_apply<T>(e, [&](const T& v) { return v > floor ? T(sqrt(v)) : T(0); });
}

template <class T>
MatrixT<T> sqrt_clamped(const MatrixT<T>& a, const T& floor = T(0)) {
  return sqrt_clamped<T>(canonical_eigen<T>(a), floor);
}

// Eigenvalues of a double-precision symmetric input that sit below this
// fraction of the largest magnitude are indistinguishable from zero.
inline double roundoff_floor(Eigen::Index d) {
  return 8.0 * static_cast<double>(d) * std::numeric_limits<double>::epsilon();
}

inline MatrixX to_extended(const Eigen::MatrixXd& m) { return m.cast<Extended>(); }
inline VectorX to_extended(const Eigen::VectorXd& v) { return v.cast<Extended>(); }
inline Eigen::MatrixXd to_double(const MatrixX& m) { return m.cast<double>(); }
inline Eigen::VectorXd to_double(const VectorX& v) { return v.cast<double>(); }

inline Extended frobenius(const MatrixX& m) {
  Extended acc = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) acc += m(i, j) * m(i, j);
  using std::sqrt;
  return sqrt(acc);
}

}  // namespace gaussot::detail
