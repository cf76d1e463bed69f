#pragma once

#include <vector>

#include "gaussot/correlation.hpp"
#include "gaussot/transport.hpp"

namespace gaussot {

// Gaussian laws whose rotated covariances O^T S_i O all share one
// correlation matrix C, with probability weights. The frame is an input: for
// more than two laws no search is attempted, it is only validated.
class BarycenterProblem {
 public:
  // Throws InvalidInput on empty input, dimension mismatch, negative weights
  // or weights not summing to 1 within 1e-12; InvalidFrame if (o, c) does not
  // reproduce some covariance within frame_tol.
  BarycenterProblem(std::vector<GaussianLaw> laws, std::vector<double> weights, Matrix o, CorrelationMatrix c,
                    double frame_tol = 1e-8);

  // Two-law problem with weights (alpha, 1 - alpha) reusing the frame's scales.
  static BarycenterProblem from_pair(const GaussianLaw& mu, const GaussianLaw& nu, double alpha,
                                     const SharedCorrelationFrame& frame, double frame_tol = 1e-8);

  std::size_t size() const noexcept { return laws_.size(); }
  Index dim() const noexcept { return o_.rows(); }
  const std::vector<GaussianLaw>& laws() const noexcept { return laws_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Matrix& o() const noexcept { return o_; }
  const CorrelationMatrix& c() const noexcept { return c_; }
  // sqrt(diag(O^T S_i O)) per law.
  const std::vector<Vector>& scales() const noexcept { return scales_; }

 private:
  BarycenterProblem(std::vector<GaussianLaw> laws, std::vector<double> weights, Matrix o, CorrelationMatrix c,
                    std::vector<Vector> scales);

  std::vector<GaussianLaw> laws_;
  std::vector<double> weights_;
  Matrix o_;
  CorrelationMatrix c_;
  std::vector<Vector> scales_;
};

// N(sum p_i m_i, O (sum p_i D_i) C (sum p_i D_i) O^T). A law with weight
// exactly 1 is returned unchanged.
GaussianLaw barycenter_n(const BarycenterProblem& problem);

// Interpolant with weight alpha on mu; alpha outside [0, 1] throws InvalidInput.
GaussianLaw barycenter_two(const GaussianLaw& mu, const GaussianLaw& nu, double alpha,
                           const SharedCorrelationFrame& frame);

// sum_i p_i W2^2(eta, law_i) using the closed form for each term.
double barycenter_functional(const GaussianLaw& eta, const BarycenterProblem& problem);

}  // namespace gaussot
