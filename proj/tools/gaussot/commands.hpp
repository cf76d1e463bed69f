#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaussot/documents.hpp"

namespace gaussot::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2, kNumericalFailure = 3 };

struct Options {
  double rank_tol = 1e-10;
  double frame_tol = 1e-8;
  double psd_tol = 1e-9;
  double eps0 = 1e-2;
  double eps_ratio = 0.5;
  int max_steps = 60;
  int grid_resolution = 21;
  bool force_continuation = false;
  std::optional<std::uint64_t> seed;
  std::string out;
};

FrameConfig frame_config(const Options& opts);

// --seed, then GAUSSOT_SEED, then 0.
std::uint64_t resolve_seed(const Options& opts);

struct CommandResult {
  int exit_code = kSuccess;
  Json document;
  std::vector<std::string> warnings;
};

CommandResult cmd_distance(const std::string& file_mu, const std::string& file_nu, const Options& opts);
CommandResult cmd_coupling(const std::string& file_mu, const std::string& file_nu, const Options& opts);

// Writes n rows "x_1,...,x_d,y_1,...,y_d" to csv_out. The returned document
// summarizes the run.
CommandResult cmd_sample(const std::string& file_mu, const std::string& file_nu, long long n, std::ostream& csv_out,
                         const Options& opts);

// Exactly one of weights / alpha may be given; neither means equal weights.
// Without frame_file the frame of the first two laws is used (and validated
// against the rest).
CommandResult cmd_barycenter(const std::vector<std::string>& files, const std::vector<double>& weights,
                             std::optional<double> alpha, const std::string& frame_file, const Options& opts);

CommandResult cmd_verify(const std::string& file_mu, const std::string& file_nu, long long mc_samples,
                         const Options& opts);

}  // namespace gaussot::cli
