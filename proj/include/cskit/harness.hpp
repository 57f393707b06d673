#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cskit/bounds.hpp"
#include "cskit/groups.hpp"
#include "cskit/norms.hpp"
#include "cskit/sensing.hpp"
#include "cskit/solver.hpp"

namespace cskit {

enum class SignalKind { Exact, Compressible };
enum class NoiseRule { Sphere, Ball };

struct SignalModel {
  SignalKind kind = SignalKind::Exact;
  /// Geometric tail rate for the compressible model, 0 <= decay < 1.
  double decay = 0.0;
};

struct ExperimentConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  /// `singletons`, `contiguous:<size>` or a partition file.
  std::string partition = "singletons";
  Ensemble ensemble = Ensemble::Gaussian;
  /// When set, every trial uses this matrix file instead of drawing one.
  std::optional<std::string> matrix_file;
  /// Draw one matrix from the master seed and share it across trials.
  bool reuse_matrix = false;
  std::uint64_t seed = 0;
  std::string penalty = "gl";
  std::string approx = "gl";
  SignalModel signal;
  double eps = 0.0;
  NoiseRule noise = NoiseRule::Sphere;
  std::size_t trials = 1;
  unsigned threads = 0;
  SolveOptions solver;
  std::string csv_path;
  std::string json_path;

  void validate() const;
};

/// Reads `key = value` lines ('#' comments). Relative input paths (partition,
/// matrix, norm files) are resolved against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path);

GroupPartition resolve_partition(const ExperimentConfig& cfg);

/// Per-trial seeds derived from (master seed, trial id) only.
struct TrialSeeds {
  std::uint64_t matrix;
  std::uint64_t signal;
};
TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial);

/// Exact model: a uniformly chosen member filled with N(0,1) entries and
/// scaled to unit l2 norm. Compressible model: the same plus decay^(j+1) with
/// random sign on the j-th of the remaining indices in random order.
Vector draw_signal(const SignalModel& model, const GksFamily& family, std::mt19937_64& rng);
Vector draw_signal(const SignalModel& model, const GksFamily& family, std::uint64_t seed);

/// Noise of norm exactly eps (sphere) or uniform in the eps-ball.
Vector draw_noise(NoiseRule rule, std::size_t m, double eps, std::mt19937_64& rng);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t matrix_seed = 0;
  std::uint64_t signal_seed = 0;
  bool ok = false;
  std::string error_message;

  GripCertificate cert_k, cert_2k;
  bool compressible_51 = false;
  bool compressible_52 = false;
  double sigma_A = 0.0;
  double error = 0.0;
  std::optional<double> bound_51, bound_52, slack_51, slack_52;
  std::size_t iterations = 0;
  bool converged = false;
  double feasibility_residual = 0.0;
  /// Not written to the CSV, which must be replayable bit for bit.
  double wall_time_s = 0.0;
};

struct SlackSummary {
  std::size_t assessed = 0;
  std::size_t violations = 0;
  std::optional<double> min, median;
};

struct ExperimentSummary {
  std::size_t trials = 0;
  std::size_t successful = 0;
  std::size_t failed = 0;
  std::size_t certified_51 = 0;
  std::size_t certified_52 = 0;
  /// Certified (first bound) trials with error <= 1e-5, reported for eps = 0.
  std::size_t exact_recoveries = 0;
  SlackSummary slack_51, slack_52;
  NormPairConstants constants;
  double wall_time_s = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // in trial order
  ExperimentSummary summary;
};

/// generate -> certify at orders k and 2k -> draw x and noise -> solve ->
/// sparsity index -> both bounds, for every trial. Stage errors are recorded
/// in the trial and the run continues. Results do not depend on `threads`.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

inline constexpr std::string_view kCsvSchema = "# cskit-trials v1";

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result,
                         int indent = 2);

}  // namespace cskit
