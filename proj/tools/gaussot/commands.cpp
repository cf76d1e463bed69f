#include "gaussot/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace gaussot::cli {

namespace {

struct LoadedPair {
  MatrixDocument mu_doc;
  MatrixDocument nu_doc;
  GaussianLaw mu;
  GaussianLaw nu;
};

std::string label_or(const MatrixDocument& doc, const std::string& path) { return doc.label.empty() ? path : doc.label; }

LoadedPair load_pair(const std::string& file_mu, const std::string& file_nu, const Options& opts,
                     std::vector<std::string>& warnings) {
  MatrixDocument a = load_matrix_document(file_mu, warnings);
  MatrixDocument b = load_matrix_document(file_nu, warnings);
  if (a.dim != b.dim)
    throw InputError("dimension mismatch: " + std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  GaussianLaw mu = to_law(a, opts.psd_tol);
  GaussianLaw nu = to_law(b, opts.psd_tol);
  return {std::move(a), std::move(b), std::move(mu), std::move(nu)};
}

Json pair_inputs(const LoadedPair& p, const std::string& file_mu, const std::string& file_nu) {
  return Json{{"mu", label_or(p.mu_doc, file_mu)}, {"nu", label_or(p.nu_doc, file_nu)}};
}

Json frame_json(const SharedCorrelationFrame& f) {
  return Json{{"O", to_json(f.o)},
              {"C", to_json(f.c.matrix())},
              {"d_mu", to_json(f.d_mu)},
              {"d_nu", to_json(f.d_nu)},
              {"branch", std::string(to_string(f.branch))},
              {"eps_used", f.eps_used ? Json(*f.eps_used) : Json(nullptr)},
              {"steps", f.steps},
              {"residuals", {{"mu", f.residual_mu}, {"nu", f.residual_nu}}}};
}

Json law_json(const GaussianLaw& law) { return Json{{"mean", to_json(law.mean)}, {"cov", to_json(law.cov.matrix())}}; }

struct Checks {
  Json list = Json::array();
  bool all_pass = true;

  void add(const std::string& name, double value, double threshold) {
    const bool pass = value <= threshold;
    all_pass = all_pass && pass;
    list.push_back(Json{{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
  }
};

}  // namespace

FrameConfig frame_config(const Options& opts) {
  FrameConfig cfg;
  cfg.rank_tol = opts.rank_tol;
  cfg.frame_tol = opts.frame_tol;
  cfg.eps0 = opts.eps0;
  cfg.eps_ratio = opts.eps_ratio;
  cfg.max_steps = opts.max_steps;
  cfg.force_continuation = opts.force_continuation;
  return cfg;
}

std::uint64_t resolve_seed(const Options& opts) {
  if (opts.seed) return *opts.seed;
  if (const char* env = std::getenv("GAUSSOT_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || env[0] == '-') throw InputError("GAUSSOT_SEED is not an unsigned integer");
    return v;
  }
  return 0;
}

CommandResult cmd_distance(const std::string& file_mu, const std::string& file_nu, const Options& opts) {
  CommandResult r;
  const LoadedPair p = load_pair(file_mu, file_nu, opts, r.warnings);
  const double v = v_closed_form(p.mu.cov, p.nu.cov);
  const double bw2 = bw_squared(p.mu.cov, p.nu.cov);
  const double w2sq = w2_squared(p.mu, p.nu);
  Json outputs{{"V", v},
               {"bw_squared", bw2},
               {"mean_distance_squared", (p.mu.mean - p.nu.mean).squaredNorm()},
               {"w2", std::sqrt(w2sq)},
               {"w2_squared", w2sq}};
  r.document = result_document("distance", pair_inputs(p, file_mu, file_nu), std::move(outputs));
  return r;
}

CommandResult cmd_coupling(const std::string& file_mu, const std::string& file_nu, const Options& opts) {
  CommandResult r;
  const LoadedPair p = load_pair(file_mu, file_nu, opts, r.warnings);
  Json inputs = pair_inputs(p, file_mu, file_nu);
  try {
    const OptimalCoupling c = optimal_coupling(p.mu, p.nu, frame_config(opts));
    Json outputs = frame_json(c.frame);
    outputs["theta"] = to_json(c.theta);
    outputs["gamma"] = to_json(c.gamma);
    outputs["w2_squared"] = c.w2_squared;
    outputs["bw_squared"] = c.bw_squared;
    outputs["V"] = v_frame(c.frame);
    r.document = result_document("coupling", std::move(inputs), std::move(outputs));
  } catch (const ContinuationDiverged& e) {
    Json outputs = frame_json(e.best());
    outputs["theta"] = to_json(optimal_theta(e.best()));
    outputs["error"] = e.what();
    r.document = result_document("coupling", std::move(inputs), std::move(outputs));
    r.exit_code = kNumericalFailure;
  }
  return r;
}

CommandResult cmd_sample(const std::string& file_mu, const std::string& file_nu, long long n, std::ostream& csv_out,
                         const Options& opts) {
  if (n < 1) throw InputError("--n must be at least 1");
  CommandResult r;
  const LoadedPair p = load_pair(file_mu, file_nu, opts, r.warnings);
  const std::uint64_t seed = resolve_seed(opts);
  const OptimalCoupling c = optimal_coupling(p.mu, p.nu, frame_config(opts));
  const CouplingSamples s = sample_coupling(c, p.mu, p.nu, static_cast<std::size_t>(n), seed);

  char buf[32];
  std::string line;
  for (Index k = 0; k < s.xs.rows(); ++k) {
    line.clear();
    for (Index j = 0; j < s.xs.cols() + s.ys.cols(); ++j) {
      const double v = j < s.xs.cols() ? s.xs(k, j) : s.ys(k, j - s.xs.cols());
      std::snprintf(buf, sizeof buf, "%.17g", v);
      if (j > 0) line += ',';
      line += buf;
    }
    line += '\n';
    csv_out << line;
  }
  csv_out.flush();
  if (!csv_out) throw InputError("failed to write samples");

  Json outputs{{"n", n}, {"seed", seed}, {"columns", 2 * p.mu.dim()}, {"w2_squared", c.w2_squared}};
  r.document = result_document("sample", pair_inputs(p, file_mu, file_nu), std::move(outputs));
  return r;
}

CommandResult cmd_barycenter(const std::vector<std::string>& files, const std::vector<double>& weights_in,
                             std::optional<double> alpha, const std::string& frame_file, const Options& opts) {
  if (files.empty()) throw InputError("barycenter needs at least one law file");
  CommandResult r;
  std::vector<MatrixDocument> docs;
  std::vector<GaussianLaw> laws;
  Json labels = Json::array();
  for (const auto& f : files) {
    docs.push_back(load_matrix_document(f, r.warnings));
    if (docs.back().dim != docs.front().dim) throw InputError("dimension mismatch between law files");
    laws.push_back(to_law(docs.back(), opts.psd_tol));
    labels.push_back(label_or(docs.back(), f));
  }
  const std::size_t n = laws.size();

  std::vector<double> weights;
  if (alpha && !weights_in.empty()) throw InputError("give either --weights or --alpha, not both");
  if (alpha) {
    if (n != 2) throw InputError("--alpha needs exactly two laws");
    if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw InputError("--alpha must lie in [0, 1]");
    weights = {*alpha, 1.0 - *alpha};
  } else if (!weights_in.empty()) {
    if (weights_in.size() != n) throw InputError("--weights needs one weight per law");
    double sum = 0.0;
    for (double w : weights_in) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("weights must sum to 1 within 1e-9");
    for (double w : weights_in) weights.push_back(w / sum);
  } else {
    weights.assign(n, 1.0 / static_cast<double>(n));
  }

  const Index d = laws.front().dim();
  Matrix o;
  std::optional<CorrelationMatrix> c;
  std::optional<SharedCorrelationFrame> pair_frame;
  if (!frame_file.empty()) {
    const FrameDocument fd = load_frame_document(frame_file);
    if (fd.o.rows() != d) throw InputError("frame dimension does not match the laws");
    o = fd.o;
    try {
      c.emplace(fd.c);
    } catch (const Error& e) {
      throw InputError(frame_file + ": " + e.what());
    }
  } else if (n == 1) {
    o = Matrix::Identity(d, d);
    c.emplace(correlation_of(laws.front().cov, opts.rank_tol));
  } else {
    pair_frame = shared_correlation_frame(laws[0].cov, laws[1].cov, frame_config(opts));
    o = pair_frame->o;
    c.emplace(pair_frame->c);
  }

  const BarycenterProblem problem =
      (n == 2 && pair_frame) ? BarycenterProblem::from_pair(laws[0], laws[1], weights[0], *pair_frame, opts.frame_tol)
                             : BarycenterProblem(laws, weights, o, *c, opts.frame_tol);
  const GaussianLaw eta = barycenter_n(problem);
  const double functional = barycenter_functional(eta, problem);

  Json outputs{{"barycenter", law_json(eta)},
               {"functional", functional},
               {"weights", weights},
               {"frame", {{"O", to_json(problem.o())}, {"C", to_json(problem.c().matrix())}}}};
  if (n == 2) {
    const double w2sq = w2_squared(laws[0], laws[1]);
    outputs["w2_squared"] = w2sq;
    outputs["identity_residual"] = std::abs(functional - weights[0] * weights[1] * w2sq);
  }
  r.document = result_document("barycenter", Json{{"laws", labels}}, std::move(outputs));
  return r;
}

CommandResult cmd_verify(const std::string& file_mu, const std::string& file_nu, long long mc_samples,
                         const Options& opts) {
  if (mc_samples < 2) throw InputError("--n must be at least 2 for the Monte Carlo checks");
  CommandResult r;
  const LoadedPair p = load_pair(file_mu, file_nu, opts, r.warnings);
  const std::uint64_t seed = resolve_seed(opts);
  const Index d = p.mu.dim();
  Checks checks;

  const double v = v_closed_form(p.mu.cov, p.nu.cov);
  const double vscale = std::max(1.0, v);
  const double tr_scale = std::max(1.0, p.mu.cov.matrix().trace() + p.nu.cov.matrix().trace());
  // A diverged continuation is a failed check, not an abort: the remaining
  // checks still run on the best candidate.
  OptimalCoupling c = [&] {
    try {
      return optimal_coupling(p.mu, p.nu, frame_config(opts));
    } catch (const ContinuationDiverged& e) {
      return coupling_covariance(e.best(), p.mu, p.nu, std::numeric_limits<double>::infinity());
    }
  }();

  checks.add("frame_residual", c.frame.max_residual(), opts.frame_tol);
  checks.add("v_frame_vs_closed_form", std::abs(v_frame(c.frame) - v) / vscale, opts.frame_tol);
  checks.add("trace_theta_vs_v", std::abs(c.theta.trace() - v) / vscale, opts.frame_tol);
  checks.add("bw_frame_vs_closed_form", std::abs(c.bw_squared - bw_squared(p.mu.cov, p.nu.cov)) / tr_scale,
             opts.frame_tol);

  const PsdCheck g = is_psd(SymMatrix(c.gamma), opts.psd_tol);
  const double gscale = std::max(1.0, std::abs(sym_eigen(SymMatrix(c.gamma)).values(0)));
  checks.add("gamma_psd", std::max(0.0, -g.min_eigenvalue) / gscale, opts.psd_tol);
  const double marginal_gap = std::max((c.gamma.topLeftCorner(d, d) - p.mu.cov.matrix()).cwiseAbs().maxCoeff(),
                                       (c.gamma.bottomRightCorner(d, d) - p.nu.cov.matrix()).cwiseAbs().maxCoeff());
  checks.add("gamma_marginals", marginal_gap, 1e-12);
  checks.add("w2_decomposition",
             std::abs(c.w2_squared - ((p.mu.mean - p.nu.mean).squaredNorm() + c.bw_squared)) /
                 std::max(1.0, c.w2_squared),
             1e-10);

  if (d <= 2) {
    GridConfig grid;
    grid.resolution = opts.grid_resolution;
    const BruteForceResult bf = theta_brute_force(p.mu.cov, p.nu.cov, grid);
    checks.add("brute_force_gap", std::abs(bf.v_hat - v) / vscale, grid.accuracy);
    checks.add("grid_dominance", bf.grid_best - v, 1e-9);
  }

  const double bw2 = c.bw_squared;
  checks.add("cauchy_schwarz_at_frame", std::abs(cauchy_schwarz_bound(p.mu.cov, p.nu.cov, c.frame.o) - bw2), 1e-8);
  NormalStream rotations(seed ^ 0xC5A3B1F2D4E69788ULL);
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k)
    worst_excess =
        std::max(worst_excess, cauchy_schwarz_bound(p.mu.cov, p.nu.cov, random_orthogonal(d, rotations)) - bw2);
  checks.add("cauchy_schwarz_sweep", worst_excess, 1e-9);

  if (p.mu.cov.is_invertible(opts.rank_tol)) {
    const MongeMap t = monge_map(p.mu, p.nu, opts.rank_tol);
    const Matrix pushed = t.a * p.mu.cov.matrix() * t.a.transpose();
    checks.add("monge_pushforward",
               (pushed - p.nu.cov.matrix()).norm() / std::max(1.0, p.nu.cov.matrix().norm()), 1e-8);
  }

  // Statistical checks carry a small absolute slack so that exact cases
  // (zero standard error) are not failed by roundoff in w2^2.
  const double slack = 1e-9 * std::max(1.0, c.w2_squared);
  const auto n = static_cast<std::size_t>(mc_samples);
  const McCost opt = coupling_cost_mc(sample_coupling(c, p.mu, p.nu, n, seed));
  checks.add("mc_cost", std::abs(opt.mean_cost - c.w2_squared), 3.0 * opt.std_error + slack);
  const McCost prod = coupling_cost_mc(sample_product_coupling(p.mu, p.nu, n, seed ^ 0x5851F42D4C957F2DULL));
  checks.add("product_coupling_dominance", opt.mean_cost - prod.mean_cost,
             3.0 * std::hypot(opt.std_error, prod.std_error) + slack);

  Json outputs{{"checks", checks.list}, {"all_pass", checks.all_pass}, {"seed", seed}, {"V", v},
               {"w2_squared", c.w2_squared}, {"branch", std::string(to_string(c.frame.branch))}};
  r.document = result_document("verify", pair_inputs(p, file_mu, file_nu), std::move(outputs));
  r.exit_code = checks.all_pass ? kSuccess : kVerificationFailed;
  return r;
}

}  // namespace gaussot::cli
