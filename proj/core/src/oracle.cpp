#include "gaussot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gaussot/random.hpp"

namespace gaussot {

namespace {

// Gamma is at most 4 x 4 here; fixed capacity keeps the inner loops off the heap.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

struct Coordinate {
  Index row;
  Index col;
  double bound;
};

SmallMatrix joint(const Matrix& mu, const Matrix& nu, const Matrix& theta) {
  const Index d = mu.rows();
  SmallMatrix g(2 * d, 2 * d);
  g.topLeftCorner(d, d) = mu;
  g.topRightCorner(d, d) = theta;
  g.bottomLeftCorner(d, d) = theta.transpose();
  g.bottomRightCorner(d, d) = nu;
  return g;
}

bool lexicographically_less(const Matrix& a, const Matrix& b) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
  return false;
}

// tr(Theta) + tau * log det(Gamma), -inf outside the open PD cone.
class BarrierObjective {
 public:
  BarrierObjective(Matrix mu, Matrix nu) : mu_(std::move(mu)), nu_(std::move(nu)) {}

  double log_det(const Matrix& theta) const {
    Eigen::LLT<SmallMatrix> llt(joint(mu_, nu_, theta));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Index i = 0; i < l.rows(); ++i) {
      if (!(l(i, i) > 0.0)) return -std::numeric_limits<double>::infinity();
      acc += std::log(l(i, i));
    }
    return 2.0 * acc;
  }

  // Newton step for the objective at a strictly feasible theta, or zero when
  // the Hessian cannot be factored.
  Matrix newton_step(const Matrix& theta, double tau) const {
    const Index d = mu_.rows();
    const Index n = d * d;
    const SmallMatrix g = joint(mu_, nu_, theta);
    Eigen::LLT<SmallMatrix> llt(g);
    if (llt.info() != Eigen::Success) return Matrix::Zero(d, d);
    const SmallMatrix w = llt.solve(SmallMatrix::Identity(2 * d, 2 * d));
    std::vector<SmallMatrix> a(static_cast<std::size_t>(n), SmallMatrix::Zero(2 * d, 2 * d));
    Eigen::VectorXd grad(n);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        const Index k = i * d + j;
        a[k](i, d + j) = a[k](d + j, i) = 1.0;
        grad(k) = (i == j ? 1.0 : 0.0) + 2.0 * tau * w(d + j, i);
      }
    Matrix neg_hessian(n, n);
    for (Index k = 0; k < n; ++k) {
      const SmallMatrix wa = w * a[k];
      for (Index l = k; l < n; ++l) neg_hessian(k, l) = neg_hessian(l, k) = tau * (wa * w * a[l]).trace();
    }
    Eigen::LDLT<Matrix> ldlt(neg_hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return Matrix::Zero(d, d);
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) return Matrix::Zero(d, d);
    Matrix out(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) out(i, j) = step(i * d + j);
    return out;
  }

  double operator()(const Matrix& theta, double tau) const {
    const double ld = log_det(theta);
    if (!std::isfinite(ld)) return -std::numeric_limits<double>::infinity();
    return theta.trace() + tau * ld;
  }

 private:
  Matrix mu_;
  Matrix nu_;
};

// Maximizes the barrier objective along theta + t * dir: bisection locates the
// ends of the feasible interval around t = 0 inside the box, then
// golden-section search runs inside it (the objective is concave along lines).
double line_maximize(const BarrierObjective& f, Matrix& theta, const Matrix& dir,
                     const std::vector<Coordinate>& box, double tau) {
  const Matrix start = theta;
  auto at = [&](double t) { return f(start + t * dir, tau); };

  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  for (const auto& c : box) {
    const double v = dir(c.row, c.col);
    if (v == 0.0) continue;
    const double a = (-c.bound - start(c.row, c.col)) / v;
    const double b = (c.bound - start(c.row, c.col)) / v;
    t_lo = std::max(t_lo, std::min(a, b));
    t_hi = std::min(t_hi, std::max(a, b));
  }
  if (!std::isfinite(t_lo) || !std::isfinite(t_hi)) return f(start, tau);

  auto edge = [&](double target) {
    if (std::isfinite(at(target))) return target;
    double inside = 0.0, outside = target;
    for (int it = 0; it < 80 && std::abs(outside - inside) > 1e-16 * (1.0 + std::abs(inside)); ++it) {
      const double mid = 0.5 * (inside + outside);
      (std::isfinite(at(mid)) ? inside : outside) = mid;
    }
    return inside;
  };
  double lo = edge(t_lo);
  double hi = edge(t_hi);

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 120 && (hi - lo) > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = at(x1);
    }
  }
  const double base = f(start, tau);
  const double best_x = f1 >= f2 ? x1 : x2;
  const double best_f = std::max(f1, f2);
  if (best_f > base) {
    theta = start + best_x * dir;
    return best_f;
  }
  return base;
}

}  // namespace

SampleCloud::SampleCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) throw Error(ErrorKind::InvalidInput, "sample cloud is empty");
  if (!points_.allFinite()) throw Error(ErrorKind::InvalidInput, "sample cloud has non-finite entries");
}

BruteForceResult theta_brute_force(const PsdMatrix& sigma_mu, const PsdMatrix& sigma_nu, const GridConfig& cfg) {
  const Index d = sigma_mu.dim();
  if (sigma_nu.dim() != d) throw Error(ErrorKind::InvalidInput, "covariances have different dimensions");
  if (d > 2)
    throw Error(ErrorKind::UnsupportedDimension, "brute force supports d <= 2, got d = " + std::to_string(d));
  if (cfg.resolution < 2) throw Error(ErrorKind::InvalidInput, "grid resolution must be at least 2");

  const Matrix& mu = sigma_mu.matrix();
  const Matrix& nu = sigma_nu.matrix();

  std::vector<Coordinate> coords;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      coords.push_back({i, j, std::sqrt(std::max(0.0, mu(i, i)) * std::max(0.0, nu(j, j)))});

  // Mixed-radix walk; coordinates with a zero bound are pinned at 0.
  std::vector<int> radix;
  for (const auto& c : coords) radix.push_back(c.bound > 0.0 ? cfg.resolution : 1);
  auto value_at = [&](std::size_t k, int step) {
    if (radix[k] == 1) return 0.0;
    return -coords[k].bound + 2.0 * coords[k].bound * step / (cfg.resolution - 1);
  };

  BruteForceResult out;
  out.grid_resolution = 2.0 / (cfg.resolution - 1);
  out.theta_hat = Matrix::Zero(d, d);
  std::vector<std::pair<double, Matrix>> feasible;
  bool have_best = false;

  std::vector<int> step(coords.size(), 0);
  while (true) {
    Matrix theta(d, d);
    for (std::size_t k = 0; k < coords.size(); ++k) theta(coords[k].row, coords[k].col) = value_at(k, step[k]);
    ++out.grid_points;
    const SmallMatrix g = joint(mu, nu, theta);
    if (is_psd(SymMatrix(Matrix(g)), cfg.feasibility_tol)) {
      const double tr = theta.trace();
      ++out.feasible_points;
      if (!have_best || tr > out.grid_best || (tr == out.grid_best && lexicographically_less(theta, out.theta_hat))) {
        out.grid_best = tr;
        out.theta_hat = theta;
        have_best = true;
      }
      feasible.emplace_back(tr, std::move(theta));
    }
    std::size_t k = 0;
    while (k < step.size() && ++step[k] == radix[k]) step[k++] = 0;
    if (k == step.size()) break;
  }

  const double band = cfg.accuracy * std::max(1.0, std::abs(out.grid_best));
  for (auto& [tr, theta] : feasible) {
    if (out.near_maximizers.size() >= cfg.max_near_maximizers) break;
    if (tr >= out.grid_best - band) out.near_maximizers.push_back(std::move(theta));
  }

  // Refinement on slightly inflated covariances so the barrier has an
  // interior; the grid optimum is strictly feasible for the inflated problem.
  const double scale = std::max({1.0, mu.trace(), nu.trace()});
  const double inflate = 1e-12 * scale;
  const Matrix mu_r = mu + inflate * Matrix::Identity(d, d);
  const Matrix nu_r = nu + inflate * Matrix::Identity(d, d);
  BarrierObjective objective(mu_r, nu_r);
  std::vector<Coordinate> free_coords;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) free_coords.push_back({i, j, std::sqrt(mu_r(i, i) * nu_r(j, j))});

  Matrix theta = have_best ? out.theta_hat : Matrix::Zero(d, d);
  double tau = 0.1 * scale;
  for (int level = 0; level < cfg.refine_levels; ++level, tau *= 0.1) {
    double value = objective(theta, tau);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      // One pass over the coordinates, then a search along the net displacement
      // of the pass, which cuts down the zig-zagging of plain coordinate ascent.
      const Matrix before = theta;
      double next = value;
      for (const auto& c : free_coords) {
        Matrix dir = Matrix::Zero(d, d);
        dir(c.row, c.col) = 1.0;
        next = line_maximize(objective, theta, dir, free_coords, tau);
      }
      const Matrix moved = theta - before;
      if (moved.norm() > 0.0) next = line_maximize(objective, theta, moved, free_coords, tau);
      // Coordinate moves stall when a singular covariance flattens the feasible
      // set into a thin slab that is not aligned with the axes.
      const Matrix newton = objective.newton_step(theta, tau);
      if (newton.norm() > 0.0) next = line_maximize(objective, theta, newton, free_coords, tau);
      const bool settled = next - value <= 1e-15 * scale;
      value = next;
      if (settled) break;
    }
  }

  const double refined = theta.trace();
  const bool refined_ok = is_psd(SymMatrix(Matrix(joint(mu, nu, theta))), 1e-9).psd;
  if (refined_ok && (!have_best || refined > out.grid_best)) {
    out.theta_hat = theta;
    out.v_hat = refined;
    out.feasible = true;
  } else {
    out.v_hat = out.grid_best;
    out.feasible = have_best;
  }
  return out;
}

double empirical_w2_squared(const SampleCloud& x, const SampleCloud& y) {
  if (x.size() != y.size())
    throw Error(ErrorKind::InvalidInput, "empirical OT needs equal sample counts, got " + std::to_string(x.size()) +
                                             " and " + std::to_string(y.size()));
  if (x.dim() != y.dim()) throw Error(ErrorKind::InvalidInput, "sample clouds have different dimensions");
  if (x.size() > 512) throw Error(ErrorKind::InvalidInput, "empirical OT is limited to 512 points");
  const Index n = x.size();
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) cost(i, j) = (x.points().row(i) - y.points().row(j)).squaredNorm();
  return solve_assignment(cost).total_cost / static_cast<double>(n);
}

McCost coupling_cost_mc(const Matrix& xs, const Matrix& ys) {
  if (xs.rows() != ys.rows() || xs.cols() != ys.cols())
    throw Error(ErrorKind::InvalidInput, "paired samples have different shapes");
  const Index n = xs.rows();
  if (n < 2) throw Error(ErrorKind::InvalidInput, "Monte Carlo cost needs at least 2 pairs");
  const Vector costs = (xs - ys).rowwise().squaredNorm();
  McCost out;
  out.mean_cost = costs.mean();
  const double ss = (costs.array() - out.mean_cost).square().sum();
  out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

McCost coupling_cost_mc(const CouplingSamples& samples) { return coupling_cost_mc(samples.xs, samples.ys); }

SampleCloud sample_law(const GaussianLaw& law, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "sample count must be at least 1");
  const Matrix root = sqrt_psd(law.cov).matrix();
  NormalStream normals(seed);
  Matrix points(static_cast<Index>(n), law.dim());
  for (Index k = 0; k < static_cast<Index>(n); ++k)
    points.row(k) = (law.mean + root * normals.vector(law.dim())).transpose();
  return SampleCloud(std::move(points));
}

CouplingSamples sample_product_coupling(const GaussianLaw& mu, const GaussianLaw& nu, std::size_t n,
                                        std::uint64_t seed) {
  if (mu.dim() != nu.dim()) throw Error(ErrorKind::InvalidInput, "laws have different dimensions");
  return CouplingSamples{sample_law(mu, n, seed).points(), sample_law(nu, n, seed ^ 0x9E3779B97F4A7C15ULL).points()};
}

}  // namespace gaussot
