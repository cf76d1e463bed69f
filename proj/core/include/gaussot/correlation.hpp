#pragma once

#include <optional>
#include <string_view>

#include "gaussot/symmat.hpp"

namespace gaussot {

// PSD (within 1e-10) matrix with unit diagonal and off-diagonal entries in [-1, 1].
class CorrelationMatrix {
 public:
  // Throws InvalidInput when the diagonal is off by more than 1e-12, when an
  // off-diagonal entry exceeds 1 + 1e-12 in magnitude, or when PSD fails.
  explicit CorrelationMatrix(const Matrix& entries);

  static CorrelationMatrix identity(Index dim);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

enum class FrameBranch { NonsingularMu, NonsingularNu, EpsilonContinuation };

std::string_view to_string(FrameBranch branch) noexcept;

struct FrameConfig {
  double rank_tol = kDefaultRankTol;
  double frame_tol = 1e-8;
  double eps0 = 1e-2;
  double eps_ratio = 0.5;
  double continuation_tol = 1e-7;
  // The continuation stops early once iterates are stable and the residual is
  // below min(frame_tol, continuation_target); otherwise it runs max_steps and
  // keeps the best candidate.
  double continuation_target = 1e-10;
  int max_steps = 60;
  // Skip the direct branches and always run the epsilon continuation.
  bool force_continuation = false;
};

// Orthogonal O and correlation C such that O^T S_mu O = D_mu C D_mu and
// O^T S_nu O = D_nu C D_nu, where D = sqrt(diag(O^T S O)).
struct SharedCorrelationFrame {
  Matrix o;
  CorrelationMatrix c;
  Vector d_mu;
  Vector d_nu;
  double residual_mu = 0.0;
  double residual_nu = 0.0;
  FrameBranch branch = FrameBranch::NonsingularMu;
  std::optional<double> eps_used;
  int steps = 0;

  double max_residual() const noexcept { return residual_mu > residual_nu ? residual_mu : residual_nu; }
};

class ContinuationDiverged : public Error {
 public:
  ContinuationDiverged(const std::string& message, SharedCorrelationFrame best)
      : Error(ErrorKind::ContinuationDiverged, message), best_(std::move(best)) {}

  const SharedCorrelationFrame& best() const noexcept { return best_; }

 private:
  SharedCorrelationFrame best_;
};

// dg(S) = diag(S_11, ..., S_dd).
Matrix dg(const SymMatrix& s);

// C_ij = S_ij / sqrt(S_ii S_jj) for coordinates whose variance exceeds
// rank_tol * max_k S_kk; zero-variance coordinates get a unit diagonal and
// zero off-diagonal entries.
CorrelationMatrix correlation_of(const PsdMatrix& s, double rank_tol = kDefaultRankTol);

struct SharedCorrelationCheck {
  bool shared = false;
  double residual_1 = 0.0;
  double residual_2 = 0.0;

  explicit operator bool() const noexcept { return shared; }
};

// residual_i = ||S_i - dg(S_i)^{1/2} C dg(S_i)^{1/2}||_F / max(1, ||S_i||_F).
SharedCorrelationCheck shares_correlation(const PsdMatrix& s1, const PsdMatrix& s2,
                                          const CorrelationMatrix& c, double tol);

// Residuals of an arbitrary (O, C) against two covariances, with D recomputed
// from O. Used to validate frames handed in by callers.
SharedCorrelationCheck frame_residuals(const Matrix& o, const CorrelationMatrix& c,
                                       const PsdMatrix& s1, const PsdMatrix& s2, double tol);

// Finds (O, C) shared by O^T S_mu O and O^T S_nu O.
//
// If S_mu is invertible (rank_tol), O diagonalizes
// S_mu^{-1/2} (S_mu^{1/2} S_nu S_mu^{1/2})^{1/2} S_mu^{-1/2}; if only S_nu is
// invertible the roles are swapped. Otherwise S_mu is regularized with
// eps_n = eps0 * eps_ratio^n and the frame of (S_mu + eps_n I, S_nu) is
// followed until successive iterates stabilize and the limiting O reproduces
// both covariances within frame_tol. All intermediate algebra runs in
// quad precision.
//
// Throws ContinuationDiverged (carrying the best candidate) if no candidate
// meets frame_tol after max_steps.
SharedCorrelationFrame shared_correlation_frame(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu,
                                                const FrameConfig& cfg = {});

struct RegularizedPair {
  PsdMatrix first;
  PsdMatrix second;
  CorrelationMatrix correlation;
};

// S_i^(eps) = (dg(S_i) + eps I)^{1/2} (eps I + (1 - eps) C) (dg(S_i) + eps I)^{1/2}.
// Both outputs are positive definite and share eps I + (1 - eps) C.
RegularizedPair regularize_pair(const PsdMatrix& s1, const PsdMatrix& s2, const CorrelationMatrix& c,
                                double eps, double share_tol = 1e-8);

}  // namespace gaussot
