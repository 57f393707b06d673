#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace cskit {

/// Concentration constant eps^2/4 - eps^3/6 for Gaussian and Bernoulli
/// ensembles, defined for 0 <= eps <= 0.75.
double c0(double eps);

/// c0(eps) >= eps^2 / 8 on [0, 0.75].
bool c0_dominates_quadratic(double eps);

/// (e n / d)^d as a real (may be +inf for huge arguments); 1 <= d <= n.
long double sauer_bound(std::uint64_t n, std::uint64_t d);
/// d (1 + ln n - ln d).
long double log_sauer_bound(std::uint64_t n, std::uint64_t d);

/// sum_{i=0}^{d} C(n, i), exactly.
boost::multiprecision::cpp_int exact_subset_count(std::uint64_t n, std::uint64_t d);

enum class SparsityMode { Pure, Group };

struct SampleSizeQuery {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double delta = 0.25;  // in (0, 0.75]
  double zeta = 1e-6;   // in (0, 1)
  SparsityMode mode = SparsityMode::Pure;
  std::uint64_t g = 0;      // group mode
  std::uint64_t s_max = 0;  // group mode, 1 <= s_max <= g

  void validate() const;
};

struct SampleSizeBreakdown {
  long double prefactor = 0;       // 32 / delta^2
  long double sparsity_term = 0;   // k ln(12/delta)
  long double family_term = 0;     // Sauer bound on ln |family|
  long double confidence_term = 0; // ln(2/zeta)
  long double value = 0;           // prefactor * (sum of the terms)
  std::uint64_t m = 0;             // ceil(value)
};

/// Smallest integer m meeting the union-bound requirement, evaluated in
/// extended precision with natural logarithms and a single ceiling.
SampleSizeBreakdown min_measurements(const SampleSizeQuery& q);

/// ln of 2 |J| (12/delta)^k exp(-m delta^2 / 32).
long double log_failure_probability(std::uint64_t m, std::uint64_t k, double delta,
                                    long double log_family_size);

/// Union-bound failure probability; may exceed 1 (vacuous).
long double failure_probability(std::uint64_t m, std::uint64_t k, double delta,
                                long double log_family_size);

/// Same, with |J| replaced by the Sauer bound for the query's family.
long double failure_probability(std::uint64_t m, const SampleSizeQuery& q);

/// Published sample sizes for the two worked settings, for side-by-side
/// reporting only.
struct ReferenceSampleSize {
  SampleSizeQuery pure;
  SampleSizeQuery group;
  std::uint64_t published_pure;
  std::uint64_t published_group;
};
ReferenceSampleSize reference_microarray();
ReferenceSampleSize reference_large();

}  // namespace cskit
