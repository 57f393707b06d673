#include "cskit/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cskit/decomposition.hpp"
#include "cskit/error.hpp"

namespace cskit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  require(ec == std::errc() && ptr == end, ErrorCode::Parse,
          "config key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::Parse, "config key '" + key + "': expected a boolean");
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return p;
  return (base / path).string();
}

std::string resolve_norm_spec(const std::filesystem::path& base, const std::string& spec) {
  for (std::string_view prefix : {"slope:", "tree:"}) {
    if (spec.starts_with(prefix))
      return std::string(prefix) + resolve(base, spec.substr(prefix.size()));
  }
  return spec;
}

void require_file(const std::string& path, const std::string& what) {
  require(std::filesystem::exists(path), ErrorCode::Io, what + " not found: " + path);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(n >= 1 && m >= 1 && k >= 1, ErrorCode::InvalidArgument, "n, m and k must be positive");
  require(k <= n, ErrorCode::InvalidArgument, "k must not exceed n");
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be at least 1");
  require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be >= 0");
  require(signal.decay >= 0.0 && signal.decay < 1.0, ErrorCode::InvalidArgument,
          "decay must lie in [0, 1)");
  if (!partition.starts_with("contiguous:") && partition != "singletons")
    require_file(partition, "partition file");
  if (matrix_file) require_file(*matrix_file, "matrix file");
  for (const auto* spec : {&penalty, &approx}) {
    for (std::string_view prefix : {"slope:", "tree:"})
      if (spec->starts_with(prefix)) require_file(spec->substr(prefix.size()), "norm file");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    require(eq != std::string::npos, ErrorCode::Parse,
            "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    require(!key.empty() && !value.empty(), ErrorCode::Parse,
            "config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "n") cfg.n = parse_number<std::size_t>(key, value);
    else if (key == "m") cfg.m = parse_number<std::size_t>(key, value);
    else if (key == "k") cfg.k = parse_number<std::size_t>(key, value);
    else if (key == "partition")
      cfg.partition = (value == "singletons" || value.starts_with("contiguous:"))
                          ? value
                          : resolve(base_dir, value);
    else if (key == "ensemble") cfg.ensemble = parse_ensemble(value);
    else if (key == "matrix") cfg.matrix_file = resolve(base_dir, value);
    else if (key == "reuse_matrix") cfg.reuse_matrix = parse_bool(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "penalty") cfg.penalty = resolve_norm_spec(base_dir, value);
    else if (key == "approx") cfg.approx = resolve_norm_spec(base_dir, value);
    else if (key == "signal") {
      if (value == "exact") cfg.signal.kind = SignalKind::Exact;
      else if (value == "compressible") cfg.signal.kind = SignalKind::Compressible;
      else throw Error(ErrorCode::Parse, "signal must be exact or compressible");
    } else if (key == "decay") cfg.signal.decay = parse_number<double>(key, value);
    else if (key == "eps") cfg.eps = parse_number<double>(key, value);
    else if (key == "noise") {
      if (value == "sphere") cfg.noise = NoiseRule::Sphere;
      else if (value == "ball") cfg.noise = NoiseRule::Ball;
      else throw Error(ErrorCode::Parse, "noise must be sphere or ball");
    } else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
    else if (key == "max_iters") cfg.solver.max_iters = parse_number<std::size_t>(key, value);
    else if (key == "tol_feasibility") cfg.solver.tol_feasibility = parse_number<double>(key, value);
    else if (key == "tol_relative_change")
      cfg.solver.tol_relative_change = parse_number<double>(key, value);
    else if (key == "step_ratio") cfg.solver.step_ratio = parse_number<double>(key, value);
    else if (key == "csv") cfg.csv_path = value;
    else if (key == "json") cfg.json_path = value;
    else throw Error(ErrorCode::Parse, "unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config " + path);
  return parse_config(in, std::filesystem::path(path).parent_path());
}

GroupPartition resolve_partition(const ExperimentConfig& cfg) {
  if (cfg.partition == "singletons") return GroupPartition::singletons(cfg.n);
  if (cfg.partition.starts_with("contiguous:")) {
    const std::string size = cfg.partition.substr(std::string_view("contiguous:").size());
    return GroupPartition::contiguous(cfg.n, parse_number<std::size_t>("partition", size));
  }
  GroupPartition p = load_partition(cfg.partition);
  require(p.n() == cfg.n, ErrorCode::InvalidArgument,
          "partition file covers " + std::to_string(p.n()) + " indices, config says n = " +
              std::to_string(cfg.n));
  return p;
}

TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::array<std::uint32_t, 4> w{};
  seq.generate(w.begin(), w.end());
  return {(std::uint64_t{w[0]} << 32) | w[1], (std::uint64_t{w[2]} << 32) | w[3]};
}

Vector draw_signal(const SignalModel& model, const GksFamily& family, std::mt19937_64& rng) {
  require(!family.empty(), ErrorCode::InvalidArgument, "cannot draw from an empty family");
  require(model.decay >= 0.0 && model.decay < 1.0, ErrorCode::InvalidArgument,
          "decay must lie in [0, 1)");
  std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
  std::normal_distribution<double> normal;
  const GksMember& member = family[pick(rng)];

  Vector x = Vector::Zero(static_cast<Eigen::Index>(family.n()));
  double norm = 0.0;
  while (norm == 0.0) {
    for (Index i : member.set) x[static_cast<Eigen::Index>(i)] = normal(rng);
    norm = x.norm();
  }
  x /= norm;

  if (model.kind == SignalKind::Compressible && model.decay > 0.0) {
    std::vector<Index> rest;
    for (Index i = 0; i < family.n(); ++i)
      if (!member.set.contains(i)) rest.push_back(i);
    std::shuffle(rest.begin(), rest.end(), rng);
    double mag = model.decay;
    for (Index i : rest) {
      const bool negative = (rng() >> 63) != 0;
      x[static_cast<Eigen::Index>(i)] = negative ? -mag : mag;
      mag *= model.decay;
    }
  }
  return x;
}

Vector draw_signal(const SignalModel& model, const GksFamily& family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return draw_signal(model, family, rng);
}

Vector draw_noise(NoiseRule rule, std::size_t m, double eps, std::mt19937_64& rng) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  Vector eta = Vector::Zero(static_cast<Eigen::Index>(m));
  if (eps == 0.0) return eta;
  std::normal_distribution<double> normal;
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = normal(rng);
    norm = eta.norm();
  }
  double radius = eps;
  if (rule == NoiseRule::Ball) {
    std::uniform_real_distribution<double> unif;
    radius *= std::pow(unif(rng), 1.0 / static_cast<double>(m));
  }
  return eta * (radius / norm);
}

namespace {

struct Shared {
  const ExperimentConfig* cfg;
  GksFamily family_k;
  GksFamily family_2k;
  Norm penalty;
  Norm approx;
  NormPairConstants consts;
  std::optional<Matrix> fixed_matrix;
};

TrialRecord run_trial(const Shared& s, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig& cfg = *s.cfg;
  TrialRecord rec;
  rec.trial = trial;
  const TrialSeeds seeds = trial_seeds(cfg.seed, trial);
  rec.matrix_seed = seeds.matrix;
  rec.signal_seed = seeds.signal;
  try {
    const Matrix a = s.fixed_matrix ? *s.fixed_matrix
                                    : generate(cfg.ensemble, cfg.m, cfg.n, seeds.matrix).entries;
    rec.cert_k = certify_grip(a, s.family_k, 1);
    rec.cert_2k = certify_grip(a, s.family_2k, 1);

    std::mt19937_64 rng(seeds.signal);
    const Vector x = draw_signal(cfg.signal, s.family_k, rng);
    const Vector eta = draw_noise(cfg.noise, cfg.m, cfg.eps, rng);
    const Vector y = a * x + eta;

    const RecoveryResult sol = solve(a, y, cfg.eps, s.penalty, cfg.solver);
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    rec.feasibility_residual = sol.feasibility_residual;

    rec.sigma_A = sparsity_index(x, s.approx, s.family_k);
    const BoundReport report = evaluate_bounds(s.consts, rec.cert_k, rec.cert_2k);
    rec.compressible_51 = report.compressible_51;
    rec.compressible_52 = report.compressible_52;
    const RecoveryCheck check = verify_recovery_bound(x, sol.x_hat, rec.sigma_A, cfg.eps, report);
    rec.error = check.error;
    rec.bound_51 = check.bound_51;
    rec.bound_52 = check.bound_52;
    rec.slack_51 = check.slack_51;
    rec.slack_52 = check.slack_52;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error_message = e.what();
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SlackSummary summarize(const std::vector<TrialRecord>& records, bool first) {
  SlackSummary out;
  std::vector<double> slacks;
  for (const auto& r : records) {
    const auto& slack = first ? r.slack_51 : r.slack_52;
    if (!r.ok || !slack) continue;
    slacks.push_back(*slack);
    if (*slack < 0.0) ++out.violations;
  }
  out.assessed = slacks.size();
  if (slacks.empty()) return out;
  std::sort(slacks.begin(), slacks.end());
  out.min = slacks.front();
  const std::size_t h = slacks.size() / 2;
  out.median = slacks.size() % 2 ? slacks[h] : 0.5 * (slacks[h - 1] + slacks[h]);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const GroupPartition partition = resolve_partition(cfg);
  require(2 * cfg.k <= cfg.n, ErrorCode::InvalidArgument,
          "the order-2k certificate needs 2k <= n");

  Shared shared{&cfg,
                enumerate_gks(partition, cfg.k),
                enumerate_gks(partition, 2 * cfg.k),
                parse_norm(cfg.penalty, &partition),
                parse_norm(cfg.approx, &partition),
                {},
                std::nullopt};
  require(!shared.family_k.empty(), ErrorCode::InvalidArgument,
          "no group fits within k; the family is empty");
  try {
    shared.consts = pair_constants_analytic(shared.approx, shared.penalty, shared.family_k);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedPair) throw;
    shared.consts = pair_constants_empirical(shared.approx, shared.penalty, shared.family_k,
                                             EmpiricalMode{2000, cfg.seed});
  }
  if (cfg.matrix_file) {
    MeasurementMatrix loaded = load_matrix(*cfg.matrix_file);
    require(loaded.rows() == static_cast<Eigen::Index>(cfg.m) &&
                loaded.cols() == static_cast<Eigen::Index>(cfg.n),
            ErrorCode::InvalidArgument, "matrix file shape does not match m x n");
    shared.fixed_matrix = std::move(loaded.entries);
  } else if (cfg.reuse_matrix) {
    shared.fixed_matrix = generate(cfg.ensemble, cfg.m, cfg.n, cfg.seed).entries;
  }

  ExperimentResult result;
  result.records.resize(cfg.trials);
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.trials));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < cfg.trials; t = next++)
          result.records[t] = run_trial(shared, t);
      });
    }
  }

  ExperimentSummary& s = result.summary;
  s.trials = cfg.trials;
  s.constants = shared.consts;
  for (const auto& r : result.records) {
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    ++s.successful;
    if (r.compressible_51) {
      ++s.certified_51;
      if (r.error <= 1e-5) ++s.exact_recoveries;
    }
    if (r.compressible_52) ++s.certified_52;
  }
  s.slack_51 = summarize(result.records, true);
  s.slack_52 = summarize(result.records, false);
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  out << kCsvSchema << '\n';
  out << "trial,matrix_seed,signal_seed,ok,delta_k,delta_2k,rho_low_k,rho_high_k,rho_low_2k,"
         "rho_high_2k,compressible_51,compressible_52,sigma_A,error,bound_51,bound_52,slack_51,"
         "slack_52,iterations,converged,feasibility_residual,message\n";
  for (const auto& r : records) {
    std::string msg = r.error_message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << r.trial << ',' << r.matrix_seed << ',' << r.signal_seed << ',' << (r.ok ? 1 : 0) << ','
        << format_real(r.cert_k.delta) << ',' << format_real(r.cert_2k.delta) << ','
        << format_real(r.cert_k.rho_low) << ',' << format_real(r.cert_k.rho_high) << ','
        << format_real(r.cert_2k.rho_low) << ',' << format_real(r.cert_2k.rho_high) << ','
        << (r.compressible_51 ? 1 : 0) << ',' << (r.compressible_52 ? 1 : 0) << ','
        << format_real(r.sigma_A) << ',' << format_real(r.error) << ',' << opt(r.bound_51) << ','
        << opt(r.bound_52) << ',' << opt(r.slack_51) << ',' << opt(r.slack_52) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << format_real(r.feasibility_residual) << ',' << msg << '\n';
  }
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result, int indent) {
  using nlohmann::json;
  const ExperimentSummary& s = result.summary;
  auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
  auto slack = [&](const SlackSummary& sl) {
    return json{{"assessed", sl.assessed},
                {"violations", sl.violations},
                {"min", opt(sl.min)},
                {"median", opt(sl.median)}};
  };
  json j;
  j["schema"] = "cskit-summary v1";
  j["config"] = {{"n", cfg.n},
                 {"m", cfg.m},
                 {"k", cfg.k},
                 {"partition", cfg.partition},
                 {"ensemble", std::string(to_string(cfg.ensemble))},
                 {"seed", cfg.seed},
                 {"penalty", cfg.penalty},
                 {"approx", cfg.approx},
                 {"signal", cfg.signal.kind == SignalKind::Exact ? "exact" : "compressible"},
                 {"decay", cfg.signal.decay},
                 {"eps", cfg.eps},
                 {"noise", cfg.noise == NoiseRule::Sphere ? "sphere" : "ball"},
                 {"trials", cfg.trials}};
  j["constants"] = {{"a", s.constants.a},
                    {"b", s.constants.b},
                    {"c", s.constants.c},
                    {"d", s.constants.d},
                    {"gamma", s.constants.gamma},
                    {"f", opt(s.constants.f)},
                    {"analytic", s.constants.analytic}};
  j["trials"] = s.trials;
  j["successful"] = s.successful;
  j["failed"] = s.failed;
  j["certified_51"] = s.certified_51;
  j["certified_52"] = s.certified_52;
  j["exact_recoveries"] = s.exact_recoveries;
  j["slack_51"] = slack(s.slack_51);
  j["slack_52"] = slack(s.slack_52);
  j["wall_time_s"] = s.wall_time_s;
  return j.dump(indent);
}

}  // namespace cskit
