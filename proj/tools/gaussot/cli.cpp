#include "gaussot/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gaussot/commands.hpp"

namespace gaussot::cli {

namespace {

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--rank-tol", opts.rank_tol, "relative eigenvalue threshold for invertibility")->capture_default_str();
  cmd->add_option("--frame-tol", opts.frame_tol, "accepted frame residual")->capture_default_str();
  cmd->add_option("--psd-tol", opts.psd_tol, "PSD tolerance for inputs and joint covariances")->capture_default_str();
  cmd->add_option("--eps0", opts.eps0, "first continuation regularization")->capture_default_str();
  cmd->add_option("--eps-ratio", opts.eps_ratio, "continuation decay factor")->capture_default_str();
  cmd->add_option("--max-steps", opts.max_steps, "continuation steps")->capture_default_str();
  cmd->add_option("--grid-resolution", opts.grid_resolution, "brute-force grid points per axis")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "random seed (falls back to GAUSSOT_SEED, then 0)");
  cmd->add_flag("--force-continuation", opts.force_continuation, "always use the epsilon continuation");
  cmd->add_option("--out", opts.out, "output path (default stdout)");
}

// Writes to --out when given, otherwise to `out`.
void emit(const std::string& text, const Options& opts, std::ostream& out) {
  if (opts.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out);
  file << text;
  if (!file) throw InputError("cannot write " + opts.out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian optimal transport: W2 distances, couplings, barycenters and oracle checks", "gaussot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Options opts;
  std::string file_mu, file_nu, frame_file;
  std::vector<std::string> files;
  std::vector<double> weights;
  std::optional<double> alpha;
  long long n = 0;
  long long verify_n = 20000;

  auto* distance = app.add_subcommand("distance", "W2 and Bures-Wasserstein distance between two laws");
  auto* coupling = app.add_subcommand("coupling", "shared-correlation frame and optimal Gaussian coupling");
  auto* sample = app.add_subcommand("sample", "draw pairs from the optimal coupling as CSV");
  auto* verify = app.add_subcommand("verify", "run the independent oracle checks");
  for (auto* cmd : {distance, coupling, sample, verify}) {
    cmd->add_option("mu", file_mu, "law file for mu")->required();
    cmd->add_option("nu", file_nu, "law file for nu")->required();
    add_common(cmd, opts);
  }
  sample->add_option("--n", n, "number of pairs")->required();
  verify->add_option("--n", verify_n, "Monte Carlo pairs")->capture_default_str();

  auto* barycenter = app.add_subcommand("barycenter", "barycenter of laws sharing a correlation frame");
  barycenter->add_option("files", files, "law files")->required();
  barycenter->add_option("--weights", weights, "comma-separated weights summing to 1")->delimiter(',');
  barycenter->add_option("--alpha", alpha, "weight on the first of two laws");
  barycenter->add_option("--frame", frame_file, "frame document {\"O\", \"C\"} shared by all laws");
  add_common(barycenter, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  CommandResult result;
  try {
    if (*distance) {
      result = cmd_distance(file_mu, file_nu, opts);
    } else if (*coupling) {
      result = cmd_coupling(file_mu, file_nu, opts);
    } else if (*sample) {
      if (n < 1) throw InputError("--n must be at least 1");
      if (opts.out.empty()) {
        result = cmd_sample(file_mu, file_nu, n, out, opts);
      } else {
        std::ofstream csv(opts.out);
        if (!csv) throw InputError("cannot write " + opts.out);
        result = cmd_sample(file_mu, file_nu, n, csv, opts);
      }
    } else if (*barycenter) {
      result = cmd_barycenter(files, weights, alpha, frame_file, opts);
    } else if (*verify) {
      result = cmd_verify(file_mu, file_nu, verify_n, opts);
    }
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    if (*sample) {
      if (!opts.out.empty()) out << canonical_dump(result.document);
    } else {
      emit(canonical_dump(result.document), opts, out);
    }
    if (result.exit_code == kNumericalFailure && result.document.contains("outputs") &&
        result.document["outputs"].contains("error"))
      err << "error: " << result.document["outputs"]["error"].get<std::string>() << "\n";
    return result.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidInput ? kUsageError : kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace gaussot::cli
