#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gaussot/gaussot.hpp"

namespace gaussot::testing {

// Seeded draws for property tests. Everything derives from NormalStream so a
// (seed, call sequence) pair reproduces bit-identically.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : normals_(seed) {}

  NormalStream& normals() { return normals_; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * normals_.uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(normals_.uniform() * (hi - lo + 1)); }
  double normal() { return normals_.next(); }
  Vector vector(Index d, double scale = 1.0) { return scale * normals_.vector(d); }

  Matrix orthogonal(Index d) { return random_orthogonal(d, normals_); }

  // Q diag(lambda) Q^T with log-uniform spectrum in [lo, hi].
  PsdMatrix spd(Index d, double lo = 1e-2, double hi = 10.0) {
    const Matrix q = orthogonal(d);
    Vector lambda(d);
    for (Index i = 0; i < d; ++i) lambda(i) = std::exp(uniform(std::log(lo), std::log(hi)));
    return PsdMatrix(Matrix(q * lambda.asDiagonal() * q.transpose()));
  }

  // A A^T with A of size d x rank and entries on the 1/16 lattice, so every
  // product and sum is exact and the result is singular in exact arithmetic.
  PsdMatrix singular(Index d, Index rank) {
    while (true) {
      Matrix a(d, rank);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < rank; ++j) a(i, j) = std::round(16.0 * 1.2 * normal()) / 16.0;
      const Matrix s = a * a.transpose();
      const EigenSystem es = sym_eigen(SymMatrix(s));
      if (rank > 0 && es.values(rank - 1) < 1e-3 * std::max(1.0, es.values(0))) continue;
      return PsdMatrix(s);
    }
  }

  PsdMatrix singular(Index d) { return singular(d, integer(1, static_cast<int>(d) - 1)); }

  GaussianLaw law(const PsdMatrix& cov, double mean_scale = 1.0) { return GaussianLaw(vector(cov.dim(), mean_scale), cov); }

 private:
  NormalStream normals_;
};

enum class PairKind { Spd, RankDeficient, DoublySingular };

struct CovPair {
  PsdMatrix mu;
  PsdMatrix nu;
  PairKind kind;
};

// Rank-deficient pairs have exactly one singular member (on either side). In
// d = 1 the singular member is the zero matrix.
inline CovPair draw_pair(Gen& g, Index d, PairKind kind) {
  switch (kind) {
    case PairKind::Spd: {
      PsdMatrix a = g.spd(d);
      return {a, g.spd(d), kind};
    }
    case PairKind::RankDeficient: {
      if (d < 2) {
        PsdMatrix a = g.spd(d);
        return {a, PsdMatrix(Matrix::Zero(1, 1)), kind};
      }
      PsdMatrix s = g.singular(d);
      PsdMatrix r = g.spd(d);
      if (g.uniform(0, 1) < 0.5) return {s, r, kind};
      return {r, s, kind};
    }
    case PairKind::DoublySingular: {
      if (d < 2) return {PsdMatrix(Matrix::Zero(1, 1)), PsdMatrix(Matrix::Zero(1, 1)), kind};
      PsdMatrix a = g.singular(d);
      return {a, g.singular(d), kind};
    }
  }
  return {g.spd(d), g.spd(d), PairKind::Spd};
}

// Seeded pair for the empirical-OT checks: d = 2, SPD covariances with
// spectrum in [0.1, 4] and means of scale 3, so W2^2 is not dominated by the
// finite-sample bias. Shared by the acceptance test and its calibration.
struct EmpiricalOtCase {
  GaussianLaw mu;
  GaussianLaw nu;
  std::uint64_t seed_x;
  std::uint64_t seed_y;
};

inline EmpiricalOtCase empirical_ot_case(std::uint64_t seed) {
  Gen g(0xE0A7000000000000ULL + seed);
  GaussianLaw mu = g.law(g.spd(2, 0.1, 4.0), 3.0);
  GaussianLaw nu = g.law(g.spd(2, 0.1, 4.0), 3.0);
  return {std::move(mu), std::move(nu), 2 * seed + 1, 2 * seed + 2};
}

// Pair of SPD laws with a known common frame: O^T S O = D_i C D_i.
struct SharedFramePair {
  GaussianLaw mu;
  GaussianLaw nu;
  Matrix o;
  CorrelationMatrix c;
};

inline CorrelationMatrix random_correlation(Gen& g, Index d) {
  const Matrix b = g.normals().matrix(d, d + 1);
  Matrix s = b * b.transpose();
  const Vector inv = s.diagonal().cwiseSqrt().cwiseInverse();
  s = inv.asDiagonal() * s * inv.asDiagonal();
  s.diagonal().setOnes();
  return CorrelationMatrix(s);
}

inline SharedFramePair shared_frame_pair(Gen& g, Index d) {
  const Matrix o = g.orthogonal(d);
  const CorrelationMatrix c = random_correlation(g, d);
  auto make = [&] {
    Vector dd(d);
    for (Index i = 0; i < d; ++i) dd(i) = g.uniform(0.3, 3.0);
    Matrix s = o * dd.asDiagonal() * c.matrix() * dd.asDiagonal() * o.transpose();
    return g.law(PsdMatrix(s));
  };
  GaussianLaw mu = make();
  GaussianLaw nu = make();
  return {mu, nu, o, c};
}

inline double rel_frob(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace gaussot::testing
