#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cskit/bounds.hpp"
#include "cskit/decomposition.hpp"
#include "cskit/harness.hpp"
#include "cskit/samplesize.hpp"
#include "cskit/sensing.hpp"
#include "reference.hpp"

using namespace cskit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

// ---------------------------------------------------------------- criterion 1

Outcome worked_decompositions() {
  Outcome o;
  const auto four = GroupPartition(4, {{0, 1}, {2, 3}});
  const auto p4 = optimal_decomposition(vec({1, 0.1, 0.6, 0.6}), Norm::l1(), enumerate_gks(four, 2));
  o.require(p4.size() == 2, "n = 4 gives s = 2");
  if (p4.size() == 2) {
    o.require(p4[0].set == Support({2, 3}), "n = 4 first piece is G2");
    o.require(p4[1].set == Support({0, 1}), "n = 4 second piece is G1");
  }
  const auto eight = GroupPartition(8, {{0}, {1, 2, 3}, {4, 5}, {6, 7}});
  const auto p8 = optimal_decomposition(vec({0.1, 1, 0.2, 0.3, 0.4, 0.5, 0.4, 0.7}), Norm::l1(),
                                        enumerate_gks(eight, 4));
  o.require(p8.size() == 2, "n = 8 gives two pieces");
  if (p8.size() == 2) {
    o.require(p8[0].set == Support({4, 5, 6, 7}), "n = 8 first piece is G3 u G4");
    o.require(p8[1].set == Support({0, 1, 2, 3}), "n = 8 second piece is G1 u G2");
  }
  return o;
}

// ---------------------------------------------------------------- criterion 2

GripCertificate flat_cert(std::size_t order, double delta) {
  GripCertificate c;
  c.order = order;
  c.rho_low = 1.0 - delta;
  c.rho_high = 1.0 + delta;
  c.delta = delta;
  return c;
}

Outcome classical_constants() {
  Outcome o;
  const auto z = thm41_constants(0.0);
  o.require(z.alpha == 0.0 && z.c0 == 2.0 && z.c2 == 4.0, "delta = 0 gives (0, 2, 4)");
  double worst = 0.0;
  for (int step = 0; step <= 8; ++step) {
    const double delta = 0.05 * step;
    const auto cc = thm41_constants(delta);
    for (int k : {1, 4, 9, 16}) {
      const double rk = std::sqrt(static_cast<double>(k));
      NormPairConstants pc;
      pc.d = rk;
      pc.f = rk;
      BoundReport r;
      thm52_bound(r, pc, flat_cert(2 * static_cast<std::size_t>(k), delta),
                  flat_cert(static_cast<std::size_t>(k), delta));
      if (!r.compressible_52) {
        o.require(false, "reduction is compressible at delta " + fmt("%.2f", delta));
        continue;
      }
      worst = std::max(worst, std::abs(*r.coeff_sigma_52 - cc.c0 / rk) / (cc.c0 / rk));
      worst = std::max(worst, std::abs(*r.coeff_eps_52 - cc.c2) / cc.c2);
    }
  }
  o.require(worst <= 1e-12, "reduction within 1e-12 relative");
  o.note("worst relative gap " + fmt("%.2e", worst));
  return o;
}

// ------------------------------------------------------------ criteria 3 and 4

ExperimentConfig reference_geometry(double eps) {
  ExperimentConfig cfg;
  cfg.n = 64;
  cfg.m = 48;
  cfg.k = 8;
  cfg.partition = "contiguous:4";
  cfg.ensemble = Ensemble::Gaussian;
  cfg.penalty = "gl";
  cfg.approx = "gl";
  cfg.eps = eps;
  cfg.trials = 50;
  cfg.seed = 20240601;
  return cfg;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(out, r.records);
  return out.str();
}

std::string criterion3_csv;

Outcome exact_recovery(const ExperimentConfig& cfg, bool need_certified, bool keep_csv) {
  Outcome o;
  const auto r = run_experiment(cfg);
  if (keep_csv) criterion3_csv = csv_of(r);
  std::size_t certified = 0, recovered = 0, any_recovered = 0;
  for (const auto& t : r.records) {
    o.require(t.ok, "trial " + std::to_string(t.trial) + " ran: " + t.error_message);
    if (t.ok && t.error <= 1e-5) ++any_recovered;
    if (!t.ok || !t.compressible_51) continue;
    ++certified;
    if (t.error <= 1e-5) ++recovered;
  }
  o.require(recovered == certified, "every certified trial recovers to 1e-5");
  if (need_certified) o.require(certified > 0, "at least one certified trial");
  o.note("m = " + std::to_string(cfg.m) + ", certified " + std::to_string(certified) + "/" +
         std::to_string(cfg.trials) + ", recovered " + std::to_string(recovered) + "/" +
         std::to_string(certified) + " certified, " + std::to_string(any_recovered) + "/" +
         std::to_string(cfg.trials) + " overall");
  return o;
}

Outcome noisy_bounds(const ExperimentConfig& cfg, bool need_certified) {
  Outcome o;
  const auto r = run_experiment(cfg);
  std::size_t c51 = 0, c52 = 0;
  double min51 = INFINITY, min52 = INFINITY;
  for (const auto& t : r.records) {
    o.require(t.ok, "trial " + std::to_string(t.trial) + " ran: " + t.error_message);
    if (!t.ok) continue;
    if (t.compressible_51) {
      ++c51;
      o.require(t.converged, "certified trial " + std::to_string(t.trial) + " converged");
      o.require(*t.slack_51 >= 0.0, "first bound holds on trial " + std::to_string(t.trial));
      min51 = std::min(min51, *t.slack_51);
    }
    if (t.compressible_52) {
      ++c52;
      o.require(*t.slack_52 >= 0.0, "second bound holds on trial " + std::to_string(t.trial));
      min52 = std::min(min52, *t.slack_52);
    }
  }
  if (need_certified) o.require(c51 > 0 && c52 > 0, "at least one certified trial per bound");
  o.note("m = " + std::to_string(cfg.m) + ", certified " + std::to_string(c51) + "/" +
         std::to_string(cfg.trials) + " (first), " + std::to_string(c52) + "/" +
         std::to_string(cfg.trials) + " (second)");
  if (c51) o.note("min slack first " + fmt("%.3g", min51));
  if (c52) o.note("min slack second " + fmt("%.3g", min52));
  return o;
}

ExperimentConfig certified_regime(double eps) {
  auto cfg = reference_geometry(eps);
  cfg.m = 600;
  cfg.trials = 10;
  if (eps > 0) {
    cfg.m = 1500;
    cfg.signal = {SignalKind::Compressible, 0.3};
  }
  return cfg;
}

// ---------------------------------------------------------------- criterion 5

struct LemmaMatrix {
  GroupPartition partition;
  std::size_t k;
  std::size_t m;
  std::uint64_t seed;
};

Outcome lemma_suite() {
  Outcome o;
  const std::vector<LemmaMatrix> cases = {{GroupPartition::singletons(40), 2, 20, 1},
                                          {GroupPartition::singletons(24), 3, 18, 2},
                                          {GroupPartition::contiguous(48, 2), 4, 24, 3},
                                          {GroupPartition::contiguous(48, 3), 6, 30, 4}};
  std::mt19937_64 rng(99);
  std::bernoulli_distribution drop(0.3);
  std::size_t pairs = 0, checks = 0, violations = 0;
  double worst_ratio = 0.0;
  for (const auto& lc : cases) {
    const auto& p = lc.partition;
    const auto fam = enumerate_gks(p, lc.k);
    const Matrix a = gen_gaussian(lc.m, p.n(), lc.seed).entries;
    const auto ck = certify_grip(a, fam);
    const auto c2k = certify_grip(a, p, 2 * lc.k);
    const auto cross = check_cross_lemma(a, fam, c2k, 10000, lc.seed);
    pairs += cross.trials;
    violations += cross.violations;
    worst_ratio = std::max(worst_ratio, cross.worst_ratio);

    const Norm approx = p.all_singletons() ? Norm::l1() : Norm::group_l2(p);
    const auto consts = pair_constants_analytic(approx, approx, fam);
    const double f = p.all_singletons() ? std::sqrt(static_cast<double>(lc.k)) : *consts.f;
    std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
    for (int t = 0; t < 1000; ++t) {
      Vector h = gaussian(rng, static_cast<Eigen::Index>(p.n()));
      for (auto& v : h)
        if (drop(rng)) v = 0.0;
      const auto& l0 = fam[pick(rng)];
      const InequalityCheck all[] = {lemma_piece_sum(h, l0, approx, fam, consts.c),
                                     lemma_tail_sum(h, l0, approx, fam, f),
                                     lemma_head_bound(a, h, l0, approx, consts.c, ck, c2k),
                                     lemma_pair_head_bound(a, h, l0, approx, fam, f, c2k)};
      for (const auto& c : all) {
        ++checks;
        if (!c.holds()) ++violations;
      }
    }
  }
  o.require(violations == 0, "zero violations beyond 1e-12");
  o.note(std::to_string(pairs) + " cross pairs, worst ratio " + fmt("%.4f", worst_ratio) + ", " +
         std::to_string(checks) + " lemma instances, " + std::to_string(violations) +
         " violations");
  return o;
}

// ---------------------------------------------------------------- criterion 6

Outcome decomposability() {
  Outcome o;
  const auto p = GroupPartition::contiguous(24, 3);
  const auto fam = enumerate_gks(p, 6);
  const auto gl = check_decomposability(Norm::group_l2(p), fam, 10000, 1);
  const auto sgl = check_decomposability(Norm::sparse_group(p, 0.4), fam, 10000, 2);
  o.require(gl.violations == 0, "group lasso equality");
  o.require(sgl.violations == 0, "sparse group lasso equality");

  const auto singles = enumerate_gks(GroupPartition::singletons(8), 3);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::size_t witnesses = 0, gamma_violations = 0, lambdas = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> lambda(8);
    for (auto& l : lambda) l = u(rng);
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    if (lambda.front() == lambda.back()) continue;
    ++lambdas;
    const Norm slope = Norm::sorted_l1(lambda);
    const auto rep = check_decomposability(slope, singles, 10000, 100 + t, slope.gamma());
    if (rep.violations || rep.worst_slack < -1e-12) ++gamma_violations;
    if (check_decomposability(slope, singles, 10000, 200 + t).violations > 0) ++witnesses;
  }
  o.require(gamma_violations == 0, "sorted l1 gamma inequality");
  o.require(witnesses == lambdas, "strict violation witness for every non-flat lambda");
  o.note("sorted l1: " + std::to_string(witnesses) + "/" + std::to_string(lambdas) +
         " witnesses, " + std::to_string(gamma_violations) + " gamma violations");
  return o;
}

// ---------------------------------------------------------------- criterion 7

Outcome prox_oracles() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> step(0.01, 3.0), lam(0.05, 3.0);
  const auto p = GroupPartition(12, {{0, 1, 2}, {3}, {4, 5}, {6, 7, 8, 9}, {10, 11}});
  std::vector<double> lambda(12);
  for (auto& l : lambda) l = lam(rng);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  const Norm norms[] = {Norm::l1(), Norm::group_l2(p), Norm::sparse_group(p, 0.3),
                        Norm::sparse_group(p, 0.8), Norm::sorted_l1(lambda)};
  double worst_dual = 0.0, worst_gap = 0.0;
  for (const auto& nrm : norms) {
    for (int t = 0; t < 1000; ++t) {
      const Vector v = 2.0 * gaussian(rng, 12);
      const double s = step(rng);
      const Vector z = nrm.prox(v, s);
      const Vector g = (v - z) / s;
      worst_dual = std::max(worst_dual, nrm.dual(g) - 1.0);
      worst_gap = std::max(worst_gap, std::abs(g.dot(z) - nrm(z)) / std::max(1.0, nrm(z)));
    }
  }
  o.require(worst_dual <= 1e-8 && worst_gap <= 1e-8, "dual-norm certificate to 1e-8");

  double worst_ref = 0.0;
  std::size_t compared = 0;
  for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 25u, 50u, 100u, 150u, 200u}) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> l(n);
      for (auto& x : l) x = lam(rng);
      std::sort(l.begin(), l.end(), std::greater<>());
      const Vector v = 2.0 * gaussian(rng, static_cast<Eigen::Index>(n));
      const double s = step(rng);
      const Vector fast = prox_sorted_l1(v, l, s);
      const Vector slow = reference::prox_sorted_l1_reference(v, l, s);
      worst_ref = std::max(worst_ref, (fast - slow).cwiseAbs().maxCoeff());
      ++compared;
    }
  }
  o.require(worst_ref <= 1e-12, "fast sorted l1 prox matches the quadratic reference");
  o.note("certificate excess " + fmt("%.1e", worst_dual) + ", gap " + fmt("%.1e", worst_gap) +
         ", reference max diff " + fmt("%.1e", worst_ref) + " over " +
         std::to_string(compared) + " inputs");
  return o;
}

// ---------------------------------------------------------------- criterion 8

Outcome grip_certification() {
  Outcome o;
  for (std::size_t order : {2u, 4u, 6u}) {
    const auto id = certify_grip(Matrix::Identity(6, 6), GroupPartition::contiguous(6, 2), order);
    o.require(id.rho_low == 1.0 && id.rho_high == 1.0 && id.delta == 0.0, "identity exact");
    const auto sc =
        certify_grip(3.0 * Matrix::Identity(6, 6), GroupPartition::contiguous(6, 2), order);
    o.require(sc.rho_low == 9.0 && sc.rho_high == 9.0 && sc.delta == 0.0, "scaled identity exact");
  }

  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  const auto groups = GroupPartition::contiguous(40, 2);
  std::size_t quotients = 0, violations = 0, nested = 0;
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    const Matrix a = gen_gaussian(20, 40, 500 + seed).entries;
    const auto fam = enumerate_gks(groups, 4);
    const auto g = certify_grip(a, fam);
    const auto s = certify_grip(a, GroupPartition::singletons(40), 4);
    if (g.rho_low >= s.rho_low && g.rho_high <= s.rho_high) ++nested;
    std::uniform_int_distribution<std::size_t> pick(0, fam.size() - 1);
    for (int t = 0; t < 50000; ++t) {
      Vector z = Vector::Zero(40);
      for (Index i : fam[pick(rng)].set) z[static_cast<Eigen::Index>(i)] = normal(rng);
      const double q = (a * z).squaredNorm() / z.squaredNorm();
      ++quotients;
      if (q < g.rho_low * (1 - 1e-12) || q > g.rho_high * (1 + 1e-12)) ++violations;
    }
  }
  o.require(violations == 0, "certified interval brackets every quotient");
  o.require(nested == 2, "group interval nested in singleton interval");
  o.note(std::to_string(quotients) + " quotients, " + std::to_string(violations) + " outside");
  return o;
}

// ---------------------------------------------------------------- criterion 9

SampleSizeQuery query(std::uint64_t n, std::uint64_t k, double delta, double zeta) {
  SampleSizeQuery q;
  q.n = n;
  q.k = k;
  q.delta = delta;
  q.zeta = zeta;
  return q;
}

Outcome sample_size() {
  Outcome o;
  o.require(c0(0.75) == 0.0703125, "c0(0.75) exact");
  bool sauer = true;
  for (std::uint64_t n = 1; n <= 30; ++n)
    for (std::uint64_t d = 1; d <= n; ++d)
      sauer = sauer && exact_subset_count(n, d).convert_to<long double>() <= sauer_bound(n, d);
  o.require(sauer, "Sauer bound dominates exact counts");

  std::size_t round_trips = 0, bad = 0;
  for (std::uint64_t n : {50u, 500u, 5000u, 50000u, 500000u})
    for (std::uint64_t k : {1u, 5u, 20u, 40u})
      for (double delta : {0.1, 0.25, 0.5, 0.75, 0.05}) {
        const auto q = query(n, k, delta, 1e-6);
        ++round_trips;
        if (failure_probability(min_measurements(q).m, q) > q.zeta) ++bad;
      }
  o.require(bad == 0, "round trip on " + std::to_string(round_trips) + " queries");

  auto m = [](const SampleSizeQuery& q) { return min_measurements(q).m; };
  bool mono = true;
  for (std::uint64_t n = 100; n < 1000000; n *= 10)
    mono = mono && m(query(n, 10, 0.25, 1e-6)) <= m(query(10 * n, 10, 0.25, 1e-6));
  for (std::uint64_t k = 1; k < 50; ++k)
    mono = mono && m(query(20000, k, 0.25, 1e-6)) <= m(query(20000, k + 1, 0.25, 1e-6));
  for (double d = 0.75; d > 0.06; d -= 0.05)
    mono = mono && m(query(20000, 20, d, 1e-6)) <= m(query(20000, 20, d - 0.05, 1e-6));
  for (double z = 0.5; z > 1e-12; z /= 10)
    mono = mono && m(query(20000, 20, 0.25, z)) <= m(query(20000, 20, 0.25, z / 10));
  o.require(mono, "monotone in n, k, 1/delta and 1/zeta");

  for (const auto& ref : {reference_microarray(), reference_large()}) {
    o.note("n = " + std::to_string(ref.pure.n) + ": computed " +
           std::to_string(min_measurements(ref.pure).m) + " / " +
           std::to_string(min_measurements(ref.group).m) + ", published " +
           std::to_string(ref.published_pure) + " / " + std::to_string(ref.published_group) +
           " (not gated)");
  }
  return o;
}

// --------------------------------------------------------------- criterion 10

Outcome determinism() {
  Outcome o;
  o.require(!criterion3_csv.empty(), "criterion 3 produced a CSV");
  const std::string again = csv_of(run_experiment(reference_geometry(0.0)));
  o.require(again == criterion3_csv, "rerun CSV is bit identical");
  o.note(std::to_string(again.size()) + " bytes compared");
  return o;
}

struct Criterion {
  std::string id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1", "worked decompositions", 1e-3, worked_decompositions},
      {"2", "classical constants and reduction", 1.0, classical_constants},
      {"3", "exact recovery, reference geometry", 120.0,
       [] { return exact_recovery(reference_geometry(0.0), false, true); }},
      {"3+", "exact recovery, certified regime", 120.0,
       [] { return exact_recovery(certified_regime(0.0), true, false); }},
      {"4", "noisy bounds, reference geometry", 120.0,
       [] { return noisy_bounds(reference_geometry(1e-2), false); }},
      {"4+", "noisy bounds, certified regime", 120.0,
       [] { return noisy_bounds(certified_regime(1e-2), true); }},
      {"5", "lemma suite", 60.0, lemma_suite},
      {"6", "decomposability", 30.0, decomposability},
      {"7", "prox oracles", 30.0, prox_oracles},
      {"8", "GRIP certification", 60.0, grip_certification},
      {"9", "sample-size planner", 10.0, sample_size},
      {"10", "determinism", 120.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.limit_s, "runtime limit " + fmt("%g s", c.limit_s));
    if (!o.pass) ++failures;
    std::printf("%s  %-3s %-36s %9.4f s  %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(),
                c.name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
