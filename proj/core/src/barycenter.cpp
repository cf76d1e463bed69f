#include "gaussot/barycenter.hpp"

#include <cmath>
#include <string>

#include "detail/linalg.hpp"

namespace gaussot {

namespace {

using detail::Extended;
using detail::MatrixX;

void check_weights(const std::vector<GaussianLaw>& laws, const std::vector<double>& weights) {
  if (laws.empty()) throw Error(ErrorKind::InvalidInput, "barycenter needs at least one law");
  if (laws.size() != weights.size())
    throw Error(ErrorKind::InvalidInput, "got " + std::to_string(laws.size()) + " laws and " +
                                             std::to_string(weights.size()) + " weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidInput, "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidInput, "weights sum to " + std::to_string(total) + ", expected 1");
  for (const auto& law : laws)
    if (law.dim() != laws.front().dim()) throw Error(ErrorKind::InvalidInput, "laws have different dimensions");
}

Vector rotated_scales(const Matrix& o, const PsdMatrix& cov) {
  const MatrixX oq = detail::to_extended(o);
  const MatrixX r = oq.transpose() * detail::to_extended(cov.matrix()) * oq;
  Vector out(r.rows());
  for (Index i = 0; i < r.rows(); ++i) {
    using std::sqrt;
    out(i) = r(i, i) > Extended(0) ? static_cast<double>(sqrt(r(i, i))) : 0.0;
  }
  return out;
}

void check_frame(const Matrix& o, const CorrelationMatrix& c, const std::vector<GaussianLaw>& laws, double tol) {
  if (o.rows() != laws.front().dim() || o.cols() != o.rows() || c.dim() != o.rows())
    throw Error(ErrorKind::InvalidInput, "frame dimension does not match the laws");
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const auto r = frame_residuals(o, c, laws[i].cov, laws[i].cov, tol);
    if (!r)
      throw Error(ErrorKind::InvalidFrame, "frame does not reproduce covariance " + std::to_string(i) +
                                               " (residual " + std::to_string(r.residual_1) + ")");
  }
}

}  // namespace

BarycenterProblem::BarycenterProblem(std::vector<GaussianLaw> laws, std::vector<double> weights, Matrix o,
                                     CorrelationMatrix c, std::vector<Vector> scales)
    : laws_(std::move(laws)),
      weights_(std::move(weights)),
      o_(std::move(o)),
      c_(std::move(c)),
      scales_(std::move(scales)) {}

BarycenterProblem::BarycenterProblem(std::vector<GaussianLaw> laws, std::vector<double> weights, Matrix o,
                                     CorrelationMatrix c, double frame_tol)
    : laws_(std::move(laws)), weights_(std::move(weights)), o_(std::move(o)), c_(std::move(c)) {
  check_weights(laws_, weights_);
  check_frame(o_, c_, laws_, frame_tol);
  scales_.reserve(laws_.size());
  for (const auto& law : laws_) scales_.push_back(rotated_scales(o_, law.cov));
}

BarycenterProblem BarycenterProblem::from_pair(const GaussianLaw& mu, const GaussianLaw& nu, double alpha,
                                               const SharedCorrelationFrame& frame, double frame_tol) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorKind::InvalidInput, "alpha " + std::to_string(alpha) + " outside [0, 1]");
  std::vector<GaussianLaw> laws{mu, nu};
  std::vector<double> weights{alpha, 1.0 - alpha};
  check_weights(laws, weights);
  if (frame.o.rows() != mu.dim()) throw Error(ErrorKind::InvalidInput, "frame dimension does not match the laws");
  const auto r = frame_residuals(frame.o, frame.c, mu.cov, nu.cov, frame_tol);
  if (!r)
    throw Error(ErrorKind::InvalidFrame, "frame residuals " + std::to_string(r.residual_1) + ", " +
                                             std::to_string(r.residual_2) + " exceed tolerance");
  return BarycenterProblem(std::move(laws), std::move(weights), frame.o, frame.c, {frame.d_mu, frame.d_nu});
}

GaussianLaw barycenter_n(const BarycenterProblem& problem) {
  const auto& laws = problem.laws();
  const auto& weights = problem.weights();
  for (std::size_t i = 0; i < laws.size(); ++i)
    if (weights[i] == 1.0) return laws[i];

  const Index d = problem.dim();
  Vector mean = Vector::Zero(d);
  Vector scale = Vector::Zero(d);
  for (std::size_t i = 0; i < laws.size(); ++i) {
    mean += weights[i] * laws[i].mean;
    scale += weights[i] * problem.scales()[i];
  }
  const Matrix cov = problem.o() * scale.asDiagonal() * problem.c().matrix() * scale.asDiagonal() *
                     problem.o().transpose();
  return GaussianLaw(std::move(mean), PsdMatrix(cov));
}

GaussianLaw barycenter_two(const GaussianLaw& mu, const GaussianLaw& nu, double alpha,
                           const SharedCorrelationFrame& frame) {
  return barycenter_n(BarycenterProblem::from_pair(mu, nu, alpha, frame));
}

double barycenter_functional(const GaussianLaw& eta, const BarycenterProblem& problem) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (problem.weights()[i] == 0.0) continue;
    total += problem.weights()[i] * w2_squared(eta, problem.laws()[i]);
  }
  return total;
}

}  // namespace gaussot
