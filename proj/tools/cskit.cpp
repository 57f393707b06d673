// Command-line front end: gen-matrix, certify, decompose, solve, bounds,
// sample-size, experiment.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cskit/bounds.hpp"
#include "cskit/decomposition.hpp"
#include "cskit/error.hpp"
#include "cskit/harness.hpp"
#include "cskit/samplesize.hpp"
#include "cskit/sensing.hpp"
#include "cskit/solver.hpp"

using namespace cskit;

namespace {

GroupPartition partition_from(const std::string& spec, std::size_t n) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.partition = spec;
  return resolve_partition(cfg);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-sparse compressed sensing toolkit"};
  app.require_subcommand(1);

  // gen-matrix
  auto* gen = app.add_subcommand("gen-matrix", "draw a Gaussian or Bernoulli measurement matrix");
  std::string gen_ensemble = "gaussian", gen_out;
  std::size_t gen_m = 0, gen_n = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--ensemble", gen_ensemble, "gaussian | bernoulli");
  gen->add_option("--m", gen_m, "rows")->required();
  gen->add_option("--n", gen_n, "columns")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output file (stdout if omitted)");

  // certify
  auto* cert = app.add_subcommand("certify", "certify group RIP constants of a matrix");
  std::string cert_matrix, cert_partition = "singletons";
  std::size_t cert_order = 0, cert_cap = kDefaultEnumerationCap;
  unsigned cert_threads = 0;
  cert->add_option("--matrix", cert_matrix)->required();
  cert->add_option("--partition", cert_partition, "singletons | contiguous:<size> | file");
  cert->add_option("--order", cert_order)->required();
  cert->add_option("--cap", cert_cap, "largest family to enumerate");
  cert->add_option("--threads", cert_threads);

  // decompose
  auto* dec = app.add_subcommand("decompose", "sparsity index and optimal decomposition");
  std::string dec_x, dec_partition = "singletons", dec_norm = "l1";
  std::size_t dec_k = 0;
  dec->add_option("--x", dec_x, "vector file")->required();
  dec->add_option("--partition", dec_partition);
  dec->add_option("--k", dec_k)->required();
  dec->add_option("--norm", dec_norm, "l1 | gl | sgl:<mu> | slope:<file> | tree:<file>");

  // solve
  auto* sol = app.add_subcommand("solve", "minimise a penalty norm subject to ||y - Az|| <= eps");
  std::string sol_matrix, sol_y, sol_partition = "singletons", sol_penalty = "l1", sol_out;
  double sol_eps = 0.0;
  SolveOptions sol_opts;
  sol->add_option("--matrix", sol_matrix)->required();
  sol->add_option("--y", sol_y, "measurement vector file")->required();
  sol->add_option("--eps", sol_eps);
  sol->add_option("--partition", sol_partition);
  sol->add_option("--penalty,--norm", sol_penalty);
  sol->add_option("--max-iters", sol_opts.max_iters);
  sol->add_option("--tol", sol_opts.tol_relative_change, "relative change tolerance");
  sol->add_option("--step-ratio", sol_opts.step_ratio);
  sol->add_option("--out", sol_out, "write x_hat to this file");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "error-bound constants for a matrix and norm pair");
  std::string bnd_matrix, bnd_partition = "singletons", bnd_penalty = "l1", bnd_approx = "l1";
  std::size_t bnd_k = 0;
  bnd->add_option("--matrix", bnd_matrix)->required();
  bnd->add_option("--partition", bnd_partition);
  bnd->add_option("--k", bnd_k)->required();
  bnd->add_option("--penalty", bnd_penalty);
  bnd->add_option("--approx", bnd_approx);

  // sample-size
  auto* ss = app.add_subcommand("sample-size", "measurements needed for group RIP w.h.p.");
  std::uint64_t ss_n = 0, ss_k = 0, ss_g = 0, ss_smax = 0;
  double ss_delta = 0.25, ss_zeta = 1e-6;
  ss->add_option("--n", ss_n)->required();
  ss->add_option("--k", ss_k)->required();
  ss->add_option("--delta", ss_delta);
  ss->add_option("--zeta", ss_zeta);
  auto* ss_g_opt = ss->add_option("--g", ss_g, "number of groups");
  auto* ss_s_opt = ss->add_option("--smax", ss_smax, "most groups in a group k-sparse set");
  ss_g_opt->needs(ss_s_opt);
  ss_s_opt->needs(ss_g_opt);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a recovery experiment from a config file");
  std::string exp_config, exp_csv, exp_json;
  unsigned exp_threads = 0;
  exp->add_option("--config", exp_config)->required()->check(CLI::ExistingFile);
  exp->add_option("--csv", exp_csv, "overrides the config's csv path");
  exp->add_option("--json", exp_json, "overrides the config's json path");
  exp->add_option("--threads", exp_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const auto a = generate(parse_ensemble(gen_ensemble), gen_m, gen_n, gen_seed);
      std::ostringstream os;
      write_matrix(os, a.entries);
      write_text(gen_out, os.str());
    } else if (*cert) {
      const auto a = load_matrix(cert_matrix);
      const auto p = partition_from(cert_partition, static_cast<std::size_t>(a.cols()));
      write_certificate(std::cout, certify_grip(a.entries, p, cert_order, cert_cap, cert_threads));
    } else if (*dec) {
      const Vector x = load_vector(dec_x);
      const auto p = partition_from(dec_partition, static_cast<std::size_t>(x.size()));
      const Norm norm = parse_norm(dec_norm, &p);
      const auto family = enumerate_gks(p, dec_k);
      const auto best = best_approximation(x, norm, family);
      std::cout << "sigma " << format_real(best.value) << '\n';
      const auto pieces = optimal_decomposition(x, norm, family);
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        std::cout << "piece " << j << ':';
        for (Index i : pieces[j].set) std::cout << ' ' << i;
        std::cout << '\n';
      }
    } else if (*sol) {
      const auto a = load_matrix(sol_matrix);
      const Vector y = load_vector(sol_y);
      const auto p = partition_from(sol_partition, static_cast<std::size_t>(a.cols()));
      const auto r = solve(a.entries, y, sol_eps, parse_norm(sol_penalty, &p), sol_opts);
      if (!sol_out.empty()) save_vector(sol_out, r.x_hat);
      std::cout << recovery_result_json(r, sol_opts) << '\n';
    } else if (*bnd) {
      const auto a = load_matrix(bnd_matrix);
      const auto p = partition_from(bnd_partition, static_cast<std::size_t>(a.cols()));
      const auto family = enumerate_gks(p, bnd_k);
      const Norm penalty = parse_norm(bnd_penalty, &p);
      const Norm approx = parse_norm(bnd_approx, &p);
      NormPairConstants consts;
      try {
        consts = pair_constants_analytic(approx, penalty, family);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnsupportedPair) throw;
        consts = pair_constants_empirical(approx, penalty, family, {});
      }
      const auto ck = certify_grip(a.entries, family);
      const auto c2k = certify_grip(a.entries, p, 2 * bnd_k);
      std::cout << bound_report_json(evaluate_bounds(consts, ck, c2k)) << '\n';
    } else if (*ss) {
      SampleSizeQuery q{ss_n, ss_k, ss_delta, ss_zeta, SparsityMode::Pure, 0, 0};
      if (*ss_g_opt) {
        q.mode = SparsityMode::Group;
        q.g = ss_g;
        q.s_max = ss_smax;
      }
      const auto b = min_measurements(q);
      std::cout << "m " << b.m << '\n'
                << "value " << static_cast<double>(b.value) << '\n'
                << "prefactor " << static_cast<double>(b.prefactor) << '\n'
                << "sparsity_term " << static_cast<double>(b.sparsity_term) << '\n'
                << "family_term " << static_cast<double>(b.family_term) << '\n'
                << "confidence_term " << static_cast<double>(b.confidence_term) << '\n';
    } else if (*exp) {
      ExperimentConfig cfg = load_config(exp_config);
      if (!exp_csv.empty()) cfg.csv_path = exp_csv;
      if (!exp_json.empty()) cfg.json_path = exp_json;
      if (exp_threads) cfg.threads = exp_threads;
      const auto result = run_experiment(cfg);
      if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + cfg.csv_path);
        write_csv(out, result.records);
      }
      const std::string summary = summary_json(cfg, result);
      if (!cfg.json_path.empty()) write_text(cfg.json_path, summary + '\n');
      std::cout << summary << '\n';
      if (result.summary.successful == 0) return 2;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
