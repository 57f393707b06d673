#include "cskit/samplesize.hpp"

#include <cmath>

#include "cskit/error.hpp"

namespace cskit {

double c0(double eps) {
  require(eps >= 0.0 && eps <= 0.75, ErrorCode::InvalidArgument,
          "c0 is only defined for 0 <= eps <= 0.75");
  return eps * eps / 4.0 - eps * eps * eps / 6.0;
}

bool c0_dominates_quadratic(double eps) { return c0(eps) >= eps * eps / 8.0; }

long double log_sauer_bound(std::uint64_t n, std::uint64_t d) {
  require(d >= 1 && d <= n, ErrorCode::InvalidArgument, "Sauer bound needs 1 <= d <= n");
  const long double ld = static_cast<long double>(d);
  return ld * (1.0L + std::log(static_cast<long double>(n)) - std::log(ld));
}

long double sauer_bound(std::uint64_t n, std::uint64_t d) {
  return std::exp(log_sauer_bound(n, d));
}

boost::multiprecision::cpp_int exact_subset_count(std::uint64_t n, std::uint64_t d) {
  require(d <= n, ErrorCode::InvalidArgument, "subset count needs d <= n");
  boost::multiprecision::cpp_int binom = 1, total = 1;
  for (std::uint64_t i = 1; i <= d; ++i) {
    binom = binom * (n - i + 1) / i;
    total += binom;
  }
  return total;
}

void SampleSizeQuery::validate() const {
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument, "need 1 <= k <= n");
  require(delta > 0.0 && delta <= 0.75, ErrorCode::InvalidArgument, "need 0 < delta <= 0.75");
  require(zeta > 0.0 && zeta < 1.0, ErrorCode::InvalidArgument, "need 0 < zeta < 1");
  if (mode == SparsityMode::Group)
    require(s_max >= 1 && s_max <= g, ErrorCode::InvalidArgument, "need 1 <= s_max <= g");
}

namespace {

long double family_log_bound(const SampleSizeQuery& q) {
  return q.mode == SparsityMode::Pure ? log_sauer_bound(q.n, q.k) : log_sauer_bound(q.g, q.s_max);
}

}  // namespace

SampleSizeBreakdown min_measurements(const SampleSizeQuery& q) {
  q.validate();
  const long double delta = q.delta;
  SampleSizeBreakdown out;
  out.prefactor = 32.0L / (delta * delta);
  out.sparsity_term = static_cast<long double>(q.k) * std::log(12.0L / delta);
  out.family_term = family_log_bound(q);
  out.confidence_term = std::log(2.0L / static_cast<long double>(q.zeta));
  out.value = out.prefactor * (out.sparsity_term + out.family_term + out.confidence_term);
  out.m = static_cast<std::uint64_t>(std::ceil(out.value));
  return out;
}

long double log_failure_probability(std::uint64_t m, std::uint64_t k, double delta,
                                    long double log_family_size) {
  require(delta > 0.0 && delta <= 0.75, ErrorCode::InvalidArgument, "need 0 < delta <= 0.75");
  const long double ld = delta;
  return std::log(2.0L) + log_family_size + static_cast<long double>(k) * std::log(12.0L / ld) -
         static_cast<long double>(m) * ld * ld / 32.0L;
}

long double failure_probability(std::uint64_t m, std::uint64_t k, double delta,
                                long double log_family_size) {
  return std::exp(log_failure_probability(m, k, delta, log_family_size));
}

long double failure_probability(std::uint64_t m, const SampleSizeQuery& q) {
  q.validate();
  return failure_probability(m, q.k, q.delta, family_log_bound(q));
}

ReferenceSampleSize reference_microarray() {
  SampleSizeQuery pure{20000, 20, 0.25, 1e-6, SparsityMode::Pure, 0, 0};
  SampleSizeQuery group = pure;
  group.mode = SparsityMode::Group;
  group.g = 6000;
  group.s_max = 5;
  return {pure, group, 71286, 47960};
}

ReferenceSampleSize reference_large() {
  SampleSizeQuery pure{1000000, 50, 0.25, 1e-6, SparsityMode::Pure, 0, 0};
  SampleSizeQuery group = pure;
  group.mode = SparsityMode::Group;
  group.g = 300000;
  group.s_max = 5;
  return {pure, group, 385660, 137260};
}

}  // namespace cskit
