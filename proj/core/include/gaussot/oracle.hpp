#pragma once

#include <cstdint>
#include <vector>

#include "gaussot/symmat.hpp"
#include "gaussot/transport.hpp"

namespace gaussot {

// n x d point cloud with implicit uniform weights 1/n.
class SampleCloud {
 public:
  explicit SampleCloud(Matrix points);

  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }
  const Matrix& points() const noexcept { return points_; }

 private:
  Matrix points_;
};

struct GridConfig {
  int resolution = 21;           // grid points per free coordinate (odd keeps 0 on the grid)
  double accuracy = 1e-3;        // relative band for near-maximizers and the refinement target
  double feasibility_tol = 0.0;  // is_psd tolerance used on grid points
  int refine_levels = 9;         // barrier weights tau0 * 10^-k, k < refine_levels
  int max_sweeps = 200;          // coordinate sweeps per barrier level
  std::size_t max_near_maximizers = 64;
};

struct BruteForceResult {
  double v_hat = 0.0;
  Matrix theta_hat;
  bool feasible = false;
  double grid_resolution = 0.0;  // grid spacing as a fraction of each coordinate's half-width
  double grid_best = 0.0;        // best trace among feasible grid points
  std::size_t grid_points = 0;
  std::size_t feasible_points = 0;
  // Feasible grid points within accuracy * max(1, |grid_best|) of grid_best.
  std::vector<Matrix> near_maximizers;
};

// Direct numerical attack on sup { tr(Theta) : [[S_mu, Theta], [Theta^T, S_nu]] PSD }
// for d <= 2. A grid over the box |Theta_ij| <= sqrt(S_mu,ii S_nu,jj) is
// screened with is_psd; the best grid point seeds a coordinate-wise
// golden-section ascent on tr(Theta) + tau log det(Gamma) with tau driven
// towards zero. Uses no closed form. Throws UnsupportedDimension for d > 2.
BruteForceResult theta_brute_force(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu, const GridConfig& cfg = {});

struct Assignment {
  std::vector<Index> column_of_row;
  double total_cost = 0.0;
};

// Exact minimum-cost perfect matching on a square cost matrix
// (shortest augmenting paths with potentials, O(n^3)).
Assignment solve_assignment(const Matrix& cost);

// Squared W2 between two uniform empirical measures of equal size (<= 512):
// mean squared distance under the optimal permutation.
double empirical_w2_squared(const SampleCloud& x, const SampleCloud& y);

struct McCost {
  double mean_cost = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error of |x_k - y_k|^2 over paired rows (n >= 2).
McCost coupling_cost_mc(const Matrix& xs, const Matrix& ys);
McCost coupling_cost_mc(const CouplingSamples& samples);

// n i.i.d. draws from a Gaussian law via the symmetric root of its covariance.
SampleCloud sample_law(const GaussianLaw& law, std::size_t n, std::uint64_t seed);

// Independent (Theta = 0) coupling: x and y drawn from separate streams.
CouplingSamples sample_product_coupling(const GaussianLaw& mu, const GaussianLaw& nu, std::size_t n,
                                        std::uint64_t seed);

}  // namespace gaussot
