#include "gaussot/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/linalg.hpp"

namespace gaussot {

namespace {

using detail::Extended;
using detail::MatrixX;
using detail::VectorX;

constexpr double kCorrelationPsdTol = 1e-10;
constexpr double kCorrelationClampTol = 1e-12;

// Variances below this fraction of the largest one do not determine
// correlation entries when a better-resolved side is available.
const Extended kVarianceResolution = Extended(1e-20);

// Unit diagonal, clamped off-diagonals, and eigenvalue clipping followed by a
// diagonal rescale when roundoff pushed the matrix out of the PSD cone.
Matrix repair_correlation(Matrix c) {
  const Index d = c.rows();
  auto normalize = [d](Matrix& m) {
    for (Index i = 0; i < d; ++i) {
      m(i, i) = 1.0;
      for (Index j = 0; j < d; ++j)
        if (i != j) m(i, j) = std::clamp(m(i, j), -1.0, 1.0);
    }
  };
  normalize(c);
  const EigenSystem e = sym_eigen(SymMatrix(c));
  if (e.values(d - 1) >= -kCorrelationClampTol) return c;

  Vector clipped = e.values.cwiseMax(0.0);
  Matrix p = e.vectors * clipped.asDiagonal() * e.vectors.transpose();
  Vector scale(d);
  for (Index i = 0; i < d; ++i) scale(i) = p(i, i) > 0.0 ? 1.0 / std::sqrt(p(i, i)) : 0.0;
  Matrix r = scale.asDiagonal() * p * scale.asDiagonal();
  r = detail::symmetrized<double>(r);
  normalize(r);
  return r;
}

struct ExtendedPair {
  MatrixX mu;
  MatrixX nu;
  Extended norm_mu;  // max(1, ||S_mu||_F)
  Extended norm_nu;
};

Extended unit_floor_norm(const MatrixX& m) {
  const Extended n = detail::frobenius(m);
  return n > Extended(1) ? n : Extended(1);
}

MatrixX correlation_from(const MatrixX& s) {
  const Index d = s.rows();
  Extended top = 0;
  for (Index i = 0; i < d; ++i) top = std::max(top, s(i, i));
  MatrixX c = MatrixX::Identity(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      if (s(i, i) > kVarianceResolution * top && s(j, j) > kVarianceResolution * top) {
        using std::sqrt;
        c(i, j) = s(i, j) / sqrt(s(i, i) * s(j, j));
      }
    }
  }
  return c;
}

// O diagonalizing A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2} for invertible A
// given through its eigensystem.
MatrixX direct_frame(const detail::EigenPair<Extended>& a, const MatrixX& b) {
  using std::sqrt;
  const MatrixX root = detail::sqrt_clamped<Extended>(a);
  const MatrixX inv_root =
      detail::spectral_apply<Extended>(a, [](const Extended& v) { return Extended(1) / sqrt(v); });
  const MatrixX inner = detail::symmetrized<Extended>(root * b * root);
  const MatrixX geo = detail::symmetrized<Extended>(inv_root * detail::sqrt_clamped<Extended>(inner) * inv_root);
  return detail::canonical_eigen<Extended>(geo).vectors;
}

struct Candidate {
  SharedCorrelationFrame frame;
  Matrix theta;
};

double relative_residual(const MatrixX& rotated, const Vector& d, const Matrix& c, Extended norm) {
  const MatrixX dx = detail::to_extended(d);
  const MatrixX recon = dx.asDiagonal() * detail::to_extended(c) * dx.asDiagonal();
  return static_cast<double>(detail::frobenius(MatrixX(rotated - recon)) / norm);
}

// Builds the frame for a given O. C takes, entry by entry, the correlation
// from whichever rotated covariance resolves both coordinates better; entries
// neither side resolves come from `fallback` (the regularized iterate) when
// one is available.
Candidate assemble(const MatrixX& o_ext, const MatrixX* fallback, const ExtendedPair& p, FrameBranch branch,
                   std::optional<double> eps) {
  using std::sqrt;
  const Index d = o_ext.rows();
  const Matrix o = detail::to_double(o_ext);
  const MatrixX oq = detail::to_extended(o);
  const MatrixX a = detail::symmetrized<Extended>(oq.transpose() * p.mu * oq);
  const MatrixX b = detail::symmetrized<Extended>(oq.transpose() * p.nu * oq);

  Extended top_a = 0, top_b = 0;
  for (Index i = 0; i < d; ++i) {
    top_a = std::max(top_a, a(i, i));
    top_b = std::max(top_b, b(i, i));
  }
  VectorX da(d), db(d);
  for (Index i = 0; i < d; ++i) {
    da(i) = a(i, i) > Extended(0) ? Extended(sqrt(a(i, i))) : Extended(0);
    db(i) = b(i, i) > Extended(0) ? Extended(sqrt(b(i, i))) : Extended(0);
  }

  MatrixX merged = MatrixX::Identity(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const Extended pa = top_a > 0 ? Extended(a(i, i) * a(j, j) / (top_a * top_a)) : Extended(0);
      const Extended pb = top_b > 0 ? Extended(b(i, i) * b(j, j) / (top_b * top_b)) : Extended(0);
      const Extended resolved = kVarianceResolution * kVarianceResolution;
      if (pa <= resolved && pb <= resolved) {
        merged(i, j) = fallback ? (*fallback)(i, j) : Extended(0);
      } else if (pa >= pb) {
        merged(i, j) = a(i, j) / (da(i) * da(j));
      } else {
        merged(i, j) = b(i, j) / (db(i) * db(j));
      }
    }
  }

  Candidate out{SharedCorrelationFrame{o, CorrelationMatrix::identity(d), detail::to_double(da),
                                       detail::to_double(db), 0.0, 0.0, branch, eps, 0},
                Matrix()};

  auto score = [&](const Matrix& c) {
    return std::max(relative_residual(a, out.frame.d_mu, c, p.norm_mu),
                    relative_residual(b, out.frame.d_nu, c, p.norm_nu));
  };

  Matrix c = repair_correlation(detail::to_double(merged));
  if (fallback) {
    Matrix alt = repair_correlation(detail::to_double(*fallback));
    if (score(alt) < score(c)) c = std::move(alt);
  }
  out.frame.c = CorrelationMatrix(c);
  out.frame.residual_mu = relative_residual(a, out.frame.d_mu, c, p.norm_mu);
  out.frame.residual_nu = relative_residual(b, out.frame.d_nu, c, p.norm_nu);
  out.theta = o * out.frame.d_mu.asDiagonal() * c * out.frame.d_nu.asDiagonal() * o.transpose();
  return out;
}

bool invertible(const detail::EigenPair<Extended>& e, double rank_tol) {
  const Extended largest = e.values(0);
  const Extended smallest = e.values(e.values.size() - 1);
  return smallest > Extended(0) && smallest > Extended(rank_tol) * largest;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw Error(ErrorKind::InvalidInput, "correlation matrix must be square and non-empty");
  if (!entries.allFinite()) throw Error(ErrorKind::InvalidInput, "correlation matrix has non-finite entries");
  Matrix c = detail::symmetrized<double>(entries);
  const Index d = c.rows();
  for (Index i = 0; i < d; ++i) {
    if (std::abs(c(i, i) - 1.0) > kCorrelationClampTol)
      throw Error(ErrorKind::InvalidInput, "correlation diagonal entry " + std::to_string(c(i, i)) + " != 1");
    c(i, i) = 1.0;
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      if (std::abs(c(i, j)) > 1.0 + kCorrelationClampTol)
        throw Error(ErrorKind::InvalidInput, "correlation entry " + std::to_string(c(i, j)) + " outside [-1, 1]");
      c(i, j) = std::clamp(c(i, j), -1.0, 1.0);
    }
  }
  if (!is_psd(SymMatrix(c), kCorrelationPsdTol))
    throw Error(ErrorKind::InvalidInput, "correlation matrix is not positive semi-definite");
  entries_ = std::move(c);
}

CorrelationMatrix CorrelationMatrix::identity(Index dim) { return CorrelationMatrix(Matrix::Identity(dim, dim)); }

std::string_view to_string(FrameBranch branch) noexcept {
  switch (branch) {
    case FrameBranch::NonsingularMu: return "NonsingularMu";
    case FrameBranch::NonsingularNu: return "NonsingularNu";
    case FrameBranch::EpsilonContinuation: return "EpsilonContinuation";
  }
  return "Unknown";
}

Matrix dg(const SymMatrix& s) { return Matrix(s.matrix().diagonal().asDiagonal()); }

CorrelationMatrix correlation_of(const PsdMatrix& s, double rank_tol) {
  const Matrix& m = s.matrix();
  const Index d = m.rows();
  const double top = m.diagonal().maxCoeff();
  Matrix c = Matrix::Identity(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      if (m(i, i) > rank_tol * top && m(j, j) > rank_tol * top && m(i, i) > 0.0 && m(j, j) > 0.0)
        c(i, j) = m(i, j) / std::sqrt(m(i, i) * m(j, j));
    }
  }
  return CorrelationMatrix(repair_correlation(std::move(c)));
}

namespace {

double shared_residual(const Matrix& s, const Matrix& c) {
  const Vector root = s.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Matrix recon = root.asDiagonal() * c * root.asDiagonal();
  return (s - recon).norm() / std::max(1.0, s.norm());
}

}  // namespace

SharedCorrelationCheck shares_correlation(const PsdMatrix& s1, const PsdMatrix& s2, const CorrelationMatrix& c,
                                          double tol) {
  if (s1.dim() != s2.dim() || s1.dim() != c.dim())
    throw Error(ErrorKind::InvalidInput, "dimension mismatch in shares_correlation");
  SharedCorrelationCheck out;
  out.residual_1 = shared_residual(s1.matrix(), c.matrix());
  out.residual_2 = shared_residual(s2.matrix(), c.matrix());
  out.shared = out.residual_1 <= tol && out.residual_2 <= tol;
  return out;
}

SharedCorrelationCheck frame_residuals(const Matrix& o, const CorrelationMatrix& c, const PsdMatrix& s1,
                                       const PsdMatrix& s2, double tol) {
  if (o.rows() != s1.dim() || o.cols() != s1.dim() || s1.dim() != s2.dim() || c.dim() != s1.dim())
    throw Error(ErrorKind::InvalidInput, "dimension mismatch in frame_residuals");
  auto residual = [&](const PsdMatrix& s) {
    const MatrixX oq = detail::to_extended(o);
    const MatrixX rotated = detail::symmetrized<Extended>(oq.transpose() * detail::to_extended(s.matrix()) * oq);
    VectorX root(rotated.rows());
    for (Index i = 0; i < root.size(); ++i) {
      using std::sqrt;
      root(i) = rotated(i, i) > Extended(0) ? Extended(sqrt(rotated(i, i))) : Extended(0);
    }
    const MatrixX recon = root.asDiagonal() * detail::to_extended(c.matrix()) * root.asDiagonal();
    return static_cast<double>(detail::frobenius(MatrixX(rotated - recon)) /
                               unit_floor_norm(detail::to_extended(s.matrix())));
  };
  SharedCorrelationCheck out;
  out.residual_1 = residual(s1);
  out.residual_2 = residual(s2);
  out.shared = out.residual_1 <= tol && out.residual_2 <= tol;
  return out;
}

SharedCorrelationFrame shared_correlation_frame(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu,
                                                const FrameConfig& cfg) {
  if (sigma_mu.dim() != sigma_nu.dim())
    throw Error(ErrorKind::InvalidInput, "covariances have different dimensions");
  if (!(cfg.eps0 > 0.0) || !(cfg.eps_ratio > 0.0 && cfg.eps_ratio < 1.0) || cfg.max_steps < 1)
    throw Error(ErrorKind::InvalidInput, "continuation schedule needs eps0 > 0, eps_ratio in (0,1), max_steps >= 1");

  ExtendedPair p;
  p.mu = detail::to_extended(sigma_mu.matrix());
  p.nu = detail::to_extended(sigma_nu.matrix());
  p.norm_mu = unit_floor_norm(p.mu);
  p.norm_nu = unit_floor_norm(p.nu);

  const auto eig_mu = detail::canonical_eigen<Extended>(p.mu);
  std::optional<Candidate> best;
  auto consider = [&](Candidate&& c) {
    if (!best || c.frame.max_residual() < best->frame.max_residual()) best = std::move(c);
  };

  if (!cfg.force_continuation) {
    if (invertible(eig_mu, cfg.rank_tol)) {
      Candidate c = assemble(direct_frame(eig_mu, p.nu), nullptr, p, FrameBranch::NonsingularMu, std::nullopt);
      if (c.frame.max_residual() <= cfg.frame_tol) return std::move(c.frame);
      consider(std::move(c));
    } else {
      const auto eig_nu = detail::canonical_eigen<Extended>(p.nu);
      if (invertible(eig_nu, cfg.rank_tol)) {
        Candidate c = assemble(direct_frame(eig_nu, p.mu), nullptr, p, FrameBranch::NonsingularNu, std::nullopt);
        if (c.frame.max_residual() <= cfg.frame_tol) return std::move(c.frame);
        consider(std::move(c));
      }
    }
  }

  // Continuation on (S_mu + eps I, S_nu). S_mu + eps I shares eigenvectors
  // with S_mu, so only the eigenvalues move.
  detail::EigenPair<Extended> shifted = eig_mu;
  std::optional<Candidate> previous;
  double eps = cfg.eps0;
  for (int step = 1; step <= cfg.max_steps; ++step, eps *= cfg.eps_ratio) {
    const Extended shift(eps);
    for (Index i = 0; i < shifted.values.size(); ++i)
      shifted.values(i) = (eig_mu.values(i) > Extended(0) ? eig_mu.values(i) : Extended(0)) + shift;

    const MatrixX o_step = direct_frame(shifted, p.nu);
    const MatrixX regularized = p.mu + shift * MatrixX::Identity(p.mu.rows(), p.mu.cols());
    const MatrixX c_step = correlation_from(detail::symmetrized<Extended>(o_step.transpose() * regularized * o_step));

    Candidate c = assemble(o_step, &c_step, p, FrameBranch::EpsilonContinuation, eps);
    c.frame.steps = step;

    bool stable = false;
    if (previous) {
      const double frame_delta =
          (c.frame.o - previous->frame.o).norm() + (c.frame.c.matrix() - previous->frame.c.matrix()).norm();
      const double coupling_delta = (c.theta - previous->theta).norm() / std::max(1.0, c.theta.norm());
      stable = frame_delta <= cfg.continuation_tol || coupling_delta <= cfg.continuation_tol;
    }
    const bool accepted = stable && c.frame.max_residual() <= std::min(cfg.frame_tol, cfg.continuation_target);
    if (accepted) return std::move(c.frame);
    previous = c;
    consider(std::move(c));
  }

  if (best && best->frame.max_residual() <= cfg.frame_tol) return std::move(best->frame);
  throw ContinuationDiverged("no frame within frame_tol after " + std::to_string(cfg.max_steps) +
                                 " continuation steps (best residual " +
                                 std::to_string(best->frame.max_residual()) + ")",
                             std::move(best->frame));
}

RegularizedPair regularize_pair(const PsdMatrix& s1, const PsdMatrix& s2, const CorrelationMatrix& c, double eps,
                                double share_tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidInput, "eps must lie in (0, 1)");
  const auto check = shares_correlation(s1, s2, c, share_tol);
  if (!check) {
    throw Error(ErrorKind::NotSharedCorrelation, "inputs do not share the correlation matrix (residuals " +
                                                     std::to_string(check.residual_1) + ", " +
                                                     std::to_string(check.residual_2) + ")");
  }
  const Index d = c.dim();
  const Matrix blended = eps * Matrix::Identity(d, d) + (1.0 - eps) * c.matrix();
  auto lift = [&](const PsdMatrix& s) {
    const Vector root = (s.matrix().diagonal().array() + eps).sqrt().matrix();
    return PsdMatrix(SymMatrix(Matrix(root.asDiagonal() * blended * root.asDiagonal())), s.min_eig_tol());
  };
  return RegularizedPair{lift(s1), lift(s2), CorrelationMatrix(blended)};
}

}  // namespace gaussot
