#include "gaussot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/linalg.hpp"
#include "gaussot/random.hpp"

namespace gaussot {

namespace {

using detail::Extended;
using detail::MatrixX;

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b)
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": dimensions " + std::to_string(a) + " and " +
                                             std::to_string(b) + " differ");
}

Extended sqrt_nonneg(const Extended& v) {
  using std::sqrt;
  return v > Extended(0) ? Extended(sqrt(v)) : Extended(0);
}

// (S_mu^{1/2} S_nu S_mu^{1/2})^{1/2} in quad precision, plus the root of S_mu.
struct GeometricInner {
  MatrixX root_mu;
  detail::EigenPair<Extended> inner;
  Extended inner_floor;
};

// Largest eigenvalue magnitude, the scale of the rounding in a double input.
Extended spectral_scale(const detail::EigenPair<Extended>& e) {
  using std::abs;
  return std::max(Extended(abs(e.values(0))), Extended(abs(e.values(e.values.size() - 1))));
}

// Eigenvalues below the rounding floor of the inputs are snapped to zero: the
// square root would otherwise turn an exact zero perturbed by 1e-16 into 1e-8.
GeometricInner geometric_inner(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu) {
  const Extended floor = detail::roundoff_floor(sigma_mu.dim());
  const auto eig_mu = detail::canonical_eigen<Extended>(detail::to_extended(sigma_mu.matrix()));
  const auto eig_nu = detail::canonical_eigen<Extended>(detail::to_extended(sigma_nu.matrix()));
  GeometricInner g;
  g.root_mu = detail::sqrt_clamped<Extended>(eig_mu, floor * spectral_scale(eig_mu));
  const MatrixX inner = detail::symmetrized<Extended>(g.root_mu * detail::to_extended(sigma_nu.matrix()) * g.root_mu);
  g.inner = detail::canonical_eigen<Extended>(inner);
  g.inner_floor = floor * spectral_scale(eig_mu) * spectral_scale(eig_nu);
  return g;
}

Extended v_extended(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu) {
  const GeometricInner g = geometric_inner(sigma_mu, sigma_nu);
  Extended v = 0;
  for (Index i = 0; i < g.inner.values.size(); ++i)
    if (g.inner.values(i) > g.inner_floor) v += sqrt_nonneg(g.inner.values(i));
  return v;
}

}  // namespace

GaussianLaw::GaussianLaw(Vector mean_, PsdMatrix cov_) : mean(std::move(mean_)), cov(std::move(cov_)) {
  require_same_dim(mean.size(), cov.dim(), "GaussianLaw mean/covariance");
  if (!mean.allFinite()) throw Error(ErrorKind::InvalidInput, "GaussianLaw mean has non-finite entries");
}

GaussianLaw GaussianLaw::centered(PsdMatrix cov) {
  Vector zero = Vector::Zero(cov.dim());
  return GaussianLaw(std::move(zero), std::move(cov));
}

double v_closed_form(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu) {
  require_same_dim(sigma_mu.dim(), sigma_nu.dim(), "v_closed_form");
  return static_cast<double>(v_extended(sigma_mu, sigma_nu));
}

double v_frame(const SharedCorrelationFrame& frame) { return frame.d_mu.dot(frame.d_nu); }

Matrix optimal_theta(const SharedCorrelationFrame& frame) {
  return frame.o * frame.d_mu.asDiagonal() * frame.c.matrix() * frame.d_nu.asDiagonal() * frame.o.transpose();
}

double bw_squared(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu) {
  require_same_dim(sigma_mu.dim(), sigma_nu.dim(), "bw_squared");
  // Equal inputs give V = tr(S) exactly; the shortcut keeps bw(S, S) at 0.
  if (sigma_mu.matrix() == sigma_nu.matrix()) return 0.0;
  const double traces = sigma_mu.matrix().trace() + sigma_nu.matrix().trace();
  const Extended exact_traces =
      detail::to_extended(sigma_mu.matrix()).trace() + detail::to_extended(sigma_nu.matrix()).trace();
  const double radicand = static_cast<double>(exact_traces - 2 * v_extended(sigma_mu, sigma_nu));
  if (radicand < -1e-10 * std::max(1.0, traces)) {
    throw Error(ErrorKind::NumericalInconsistency,
                "negative Bures-Wasserstein radicand " + std::to_string(radicand));
  }
  return std::max(0.0, radicand);
}

double bw_distance(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu) {
  return std::sqrt(bw_squared(sigma_mu, sigma_nu));
}

double bw_squared_frame(const SharedCorrelationFrame& frame) { return (frame.d_mu - frame.d_nu).squaredNorm(); }

double w2_squared(const GaussianLaw& mu, const GaussianLaw& nu) {
  require_same_dim(mu.dim(), nu.dim(), "w2_squared");
  return (mu.mean - nu.mean).squaredNorm() + bw_squared(mu.cov, nu.cov);
}

double w2_gaussian(const GaussianLaw& mu, const GaussianLaw& nu) { return std::sqrt(w2_squared(mu, nu)); }

OptimalCoupling coupling_covariance(const SharedCorrelationFrame& frame, const GaussianLaw& mu,
                                    const GaussianLaw& nu, double frame_tol) {
  require_same_dim(mu.dim(), nu.dim(), "coupling_covariance");
  require_same_dim(frame.o.rows(), mu.dim(), "coupling_covariance frame");
  const auto check = frame_residuals(frame.o, frame.c, mu.cov, nu.cov, frame_tol);
  if (!check) {
    throw Error(ErrorKind::InvalidFrame, "frame residuals " + std::to_string(check.residual_1) + ", " +
                                             std::to_string(check.residual_2) + " exceed " +
                                             std::to_string(frame_tol));
  }
  const Index d = mu.dim();
  OptimalCoupling out{optimal_theta(frame), Matrix(2 * d, 2 * d), 0.0, 0.0, frame};
  out.gamma.topLeftCorner(d, d) = mu.cov.matrix();
  out.gamma.topRightCorner(d, d) = out.theta;
  out.gamma.bottomLeftCorner(d, d) = out.theta.transpose();
  out.gamma.bottomRightCorner(d, d) = nu.cov.matrix();
  out.bw_squared = bw_squared_frame(frame);
  out.w2_squared = (mu.mean - nu.mean).squaredNorm() + out.bw_squared;
  return out;
}

OptimalCoupling optimal_coupling(const GaussianLaw& mu, const GaussianLaw& nu, const FrameConfig& cfg) {
  return coupling_covariance(shared_correlation_frame(mu.cov, nu.cov, cfg), mu, nu, cfg.frame_tol);
}

MongeMap monge_map(const GaussianLaw& mu, const GaussianLaw& nu, double rank_tol) {
  require_same_dim(mu.dim(), nu.dim(), "monge_map");
  if (!mu.cov.is_invertible(rank_tol))
    throw Error(ErrorKind::SingularMatrix, "Monge map needs an invertible source covariance");
  using std::sqrt;
  const auto eig_mu = detail::canonical_eigen<Extended>(detail::to_extended(mu.cov.matrix()));
  const MatrixX root = detail::sqrt_clamped<Extended>(eig_mu);
  const MatrixX inv_root =
      detail::spectral_apply<Extended>(eig_mu, [](const Extended& v) { return Extended(1) / sqrt(v); });
  const MatrixX inner = detail::symmetrized<Extended>(root * detail::to_extended(nu.cov.matrix()) * root);
  const MatrixX a = detail::symmetrized<Extended>(inv_root * detail::sqrt_clamped<Extended>(inner) * inv_root);
  MongeMap map{detail::to_double(a), Vector()};
  map.shift = nu.mean - map.a * mu.mean;
  return map;
}

CouplingSamples sample_coupling(const OptimalCoupling& coupling, const GaussianLaw& mu, const GaussianLaw& nu,
                                std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "sample count must be at least 1");
  const SharedCorrelationFrame& f = coupling.frame;
  const Index d = f.o.rows();
  require_same_dim(mu.dim(), d, "sample_coupling");
  require_same_dim(nu.dim(), d, "sample_coupling");

  const Matrix c_root = sqrt_psd(PsdMatrix(f.c.matrix())).matrix();
  const Matrix factor_mu = f.o * f.d_mu.asDiagonal() * c_root;
  const Matrix factor_nu = f.o * f.d_nu.asDiagonal() * c_root;

  CouplingSamples out{Matrix(static_cast<Index>(n), d), Matrix(static_cast<Index>(n), d)};
  NormalStream normals(seed);
  for (Index k = 0; k < static_cast<Index>(n); ++k) {
    const Vector z = normals.vector(d);
    out.xs.row(k) = (mu.mean + factor_mu * z).transpose();
    out.ys.row(k) = (nu.mean + factor_nu * z).transpose();
  }
  return out;
}

double cauchy_schwarz_bound(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu, const Matrix& o) {
  require_same_dim(sigma_mu.dim(), sigma_nu.dim(), "cauchy_schwarz_bound");
  if (o.rows() != sigma_mu.dim() || o.cols() != sigma_mu.dim())
    throw Error(ErrorKind::InvalidInput, "rotation has the wrong shape");
  const double drift = (o.transpose() * o - Matrix::Identity(o.cols(), o.cols())).cwiseAbs().maxCoeff();
  if (drift > 1e-10) throw Error(ErrorKind::InvalidInput, "matrix is not orthogonal (deviation " + std::to_string(drift) + ")");

  const MatrixX oq = detail::to_extended(o);
  const MatrixX a = oq.transpose() * detail::to_extended(sigma_mu.matrix()) * oq;
  const MatrixX b = oq.transpose() * detail::to_extended(sigma_nu.matrix()) * oq;
  Extended total = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    const Extended gap = sqrt_nonneg(a(i, i)) - sqrt_nonneg(b(i, i));
    total += gap * gap;
  }
  return static_cast<double>(total);
}

}  // namespace gaussot
