#pragma once

#include <cstdint>

#include "gaussot/correlation.hpp"
#include "gaussot/symmat.hpp"

namespace gaussot {

struct GaussianLaw {
  GaussianLaw(Vector mean, PsdMatrix cov);

  static GaussianLaw centered(PsdMatrix cov);

  Index dim() const noexcept { return mean.size(); }

  Vector mean;
  PsdMatrix cov;
};

struct OptimalCoupling {
  Matrix theta;   // cross-covariance block
  Matrix gamma;   // joint 2d x 2d covariance
  double w2_squared = 0.0;
  double bw_squared = 0.0;
  SharedCorrelationFrame frame;
};

// x -> a (x - m_mu) + m_nu, stored as a x + shift.
struct MongeMap {
  Matrix a;
  Vector shift;

  Vector operator()(const Vector& x) const { return a * x + shift; }
};

// Row k of xs is coupled with row k of ys.
struct CouplingSamples {
  Matrix xs;
  Matrix ys;
};

// tr((S_mu^{1/2} S_nu S_mu^{1/2})^{1/2}), evaluated in quad precision.
double v_closed_form(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu);

// sum_i d_mu[i] d_nu[i]
double v_frame(const SharedCorrelationFrame& frame);

// O D_mu C D_nu O^T
Matrix optimal_theta(const SharedCorrelationFrame& frame);

// Squared Bures-Wasserstein distance tr(S_mu + S_nu) - 2 V. Radicands down to
// -1e-10 * max(1, tr(S_mu + S_nu)) are clamped to zero; anything lower throws
// NumericalInconsistency.
double bw_squared(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu);
double bw_distance(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu);

// sum_i (d_mu[i] - d_nu[i])^2
double bw_squared_frame(const SharedCorrelationFrame& frame);

double w2_squared(const GaussianLaw& mu, const GaussianLaw& nu);
double w2_gaussian(const GaussianLaw& mu, const GaussianLaw& nu);

// Gaussian optimal coupling built on a shared-correlation frame. Throws
// InvalidFrame if the frame does not reproduce both covariances within
// frame_tol.
OptimalCoupling coupling_covariance(const SharedCorrelationFrame& frame, const GaussianLaw& mu,
                                    const GaussianLaw& nu, double frame_tol = 1e-8);

// Convenience: frame search followed by coupling_covariance.
OptimalCoupling optimal_coupling(const GaussianLaw& mu, const GaussianLaw& nu, const FrameConfig& cfg = {});

// Linear optimal map for an invertible S_mu; throws SingularMatrix otherwise.
MongeMap monge_map(const GaussianLaw& mu, const GaussianLaw& nu, double rank_tol = kDefaultRankTol);

// Draws Z ~ N(0, C) through the symmetric square root of C and returns the
// pairs (m_mu + O D_mu Z, m_nu + O D_nu Z). Deterministic in (seed, n).
CouplingSamples sample_coupling(const OptimalCoupling& coupling, const GaussianLaw& mu, const GaussianLaw& nu,
                                std::size_t n, std::uint64_t seed);

// sum_i (sqrt((O^T S_mu O)_ii) - sqrt((O^T S_nu O)_ii))^2, a lower bound on
// bw^2 that is attained exactly on shared-correlation frames. Throws
// InvalidInput if o is not orthogonal within 1e-10.
double cauchy_schwarz_bound(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu, const Matrix& o);

}  // namespace gaussot
