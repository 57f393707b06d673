#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cskit/error.hpp"
#include "cskit/sensing.hpp"

using namespace cskit;

namespace {

// Random z supported inside a randomly chosen family member.
Vector random_member_vector(const GksFamily& f, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
  std::normal_distribution<double> normal;
  Vector z = Vector::Zero(static_cast<Eigen::Index>(f.n()));
  for (Index i : f[pick(rng)].set) z[static_cast<Eigen::Index>(i)] = normal(rng);
  return z;
}

}  // namespace

TEST_CASE("gaussian ensemble statistics") {
  const auto a = gen_gaussian(100, 100, 42);
  CHECK(a.provenance == Ensemble::Gaussian);
  const double mean = a.entries.mean();
  const double var = (a.entries.array() - mean).square().sum() / (100.0 * 100.0 - 1.0);
  // entry sd is 0.1, so the mean of 10^4 entries has sd 1e-3
  CHECK(std::abs(mean) <= 4e-3);
  CHECK(std::abs(var - 0.01) <= 0.001);
  CHECK(gen_gaussian(100, 100, 42).entries == a.entries);
  CHECK(gen_gaussian(100, 100, 43).entries != a.entries);
}

TEST_CASE("bernoulli ensemble") {
  const auto a = gen_bernoulli(64, 50, 7);
  const double v = 1.0 / 8.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      CHECK((a.entries(i, j) == v || a.entries(i, j) == -v));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    CHECK(a.entries.col(j).squaredNorm() == doctest::Approx(1.0).epsilon(1e-15));
  // Row sums of n = 50 entries of +-1/8 have sd sqrt(50)/8.
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    CHECK(std::abs(a.entries.row(i).sum()) <= 5.0 * std::sqrt(50.0) / 8.0);
  CHECK(gen_bernoulli(64, 50, 7).entries == a.entries);
}

TEST_CASE("ensemble names") {
  CHECK(parse_ensemble("gaussian") == Ensemble::Gaussian);
  CHECK(parse_ensemble("bernoulli") == Ensemble::Bernoulli);
  CHECK(to_string(Ensemble::Bernoulli) == "bernoulli");
  CHECK_THROWS_AS(parse_ensemble("cauchy"), Error);
}

TEST_CASE("matrix and vector text round trip is exact") {
  const auto a = gen_gaussian(7, 5, 1);
  std::stringstream s;
  write_matrix(s, a.entries);
  CHECK(read_matrix(s) == a.entries);

  Vector v(4);
  v << 0.1, -1e-300, 1.0 / 3.0, 12345.678;
  std::stringstream t;
  write_vector(t, v);
  CHECK(read_vector(t) == v);

  std::stringstream bad("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(bad), Error);
  std::stringstream nan("1 1\nnan\n");
  CHECK_THROWS_AS(read_matrix(nan), Error);
}

TEST_CASE("certification of identity matrices") {
  const auto p = GroupPartition::contiguous(6, 2);
  for (std::size_t order : {1u, 2u, 4u, 6u}) {
    const auto c = certify_grip(Matrix::Identity(6, 6), GroupPartition::singletons(6), order);
    CHECK(c.rho_low == 1.0);
    CHECK(c.rho_high == 1.0);
    CHECK(c.delta == 0.0);
    if (order >= 2) {
      const auto g = certify_grip(2.0 * Matrix::Identity(6, 6), p, order);
      CHECK(g.rho_low == 4.0);
      CHECK(g.rho_high == 4.0);
      CHECK(g.delta == 0.0);
    }
  }
}

TEST_CASE("certificate brackets rayleigh quotients") {
  const auto a = gen_gaussian(20, 40, 5).entries;
  const auto singles = GroupPartition::singletons(40);
  const auto f = enumerate_gks(singles, 2);
  const auto c = certify_grip(a, f);
  CHECK(c.order == 2);
  CHECK(c.family_size == f.size());
  CHECK(c.rho_low > 0.0);
  std::mt19937_64 rng(1);
  std::size_t violations = 0;
  for (int t = 0; t < 20000; ++t) {
    const Vector z = random_member_vector(f, rng);
    const double q = (a * z).squaredNorm() / z.squaredNorm();
    if (q < c.rho_low * (1 - 1e-12) || q > c.rho_high * (1 + 1e-12)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("group constants nest inside singleton constants") {
  const auto p = GroupPartition::contiguous(40, 2);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto a = gen_gaussian(20, 40, seed).entries;
    const auto g = certify_grip(a, p, 4);
    const auto s = certify_grip(a, GroupPartition::singletons(40), 4);
    CHECK(g.rho_low >= s.rho_low);
    CHECK(g.rho_high <= s.rho_high);
    CHECK(g.delta <= s.delta);
  }
}

TEST_CASE("certificates are monotone in the order") {
  const auto p = GroupPartition::contiguous(24, 3);
  const auto a = gen_bernoulli(18, 24, 3).entries;
  const auto c3 = certify_grip(a, p, 3);
  const auto c6 = certify_grip(a, p, 6);
  CHECK(c6.rho_low <= c3.rho_low);
  CHECK(c6.rho_high >= c3.rho_high);
  CHECK(c3.partition_hash == p.hash());
}

TEST_CASE("certificate is independent of the thread count") {
  const auto p = GroupPartition::contiguous(30, 3);
  const auto a = gen_gaussian(15, 30, 9).entries;
  const auto one = certify_grip(a, p, 6, kDefaultEnumerationCap, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const auto many = certify_grip(a, p, 6, kDefaultEnumerationCap, t);
    CHECK(many.rho_low == one.rho_low);
    CHECK(many.rho_high == one.rho_high);
  }
}

TEST_CASE("rank deficient support is reported, not thrown") {
  Matrix a = Matrix::Identity(4, 4);
  a.col(3) = a.col(2);
  const auto c = certify_grip(a, GroupPartition::singletons(4), 2);
  CHECK_FALSE(c.injective());
  CHECK(c.rho_low <= 1e-15);
}

TEST_CASE("certificate record") {
  const auto c = certify_grip(Matrix::Identity(3, 3), GroupPartition::singletons(3), 1);
  std::ostringstream out;
  write_certificate(out, c);
  const std::string s = out.str();
  for (const char* key : {"order", "rho_low", "rho_high", "delta", "family_size"})
    CHECK(s.find(key) != std::string::npos);
}

TEST_CASE("cross inner product lemma") {
  SUBCASE("identity gives orthogonal images") {
    const auto p = GroupPartition::singletons(6);
    const auto f = enumerate_gks(p, 2);
    const auto c2 = certify_grip(Matrix::Identity(6, 6), p, 4);
    const auto rep = check_cross_lemma(Matrix::Identity(6, 6), f, c2, 1000, 1);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_excess <= 0.0);
  }
  SUBCASE("gaussian 20 x 40, k = 2") {
    const auto a = gen_gaussian(20, 40, 11).entries;
    const auto p = GroupPartition::singletons(40);
    const auto f = enumerate_gks(p, 2);
    const auto c2 = certify_grip(a, p, 4);
    const auto rep = check_cross_lemma(a, f, c2, 10000, 2);
    CHECK(rep.trials == 10000);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_ratio <= 1.0 + 1e-12);
  }
  SUBCASE("wrong certificate order is rejected") {
    const auto p = GroupPartition::singletons(6);
    const auto f = enumerate_gks(p, 2);
    const auto c = certify_grip(Matrix::Identity(6, 6), p, 3);
    CHECK_THROWS_AS(check_cross_lemma(Matrix::Identity(6, 6), f, c, 10, 0), Error);
  }
}
