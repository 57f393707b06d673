#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>

#include "cskit/groups.hpp"

namespace cskit {

enum class Ensemble { Gaussian, Bernoulli, Loaded };

std::string_view to_string(Ensemble e);
Ensemble parse_ensemble(std::string_view name);

struct MeasurementMatrix {
  Matrix entries;
  Ensemble provenance = Ensemble::Loaded;
  std::uint64_t seed = 0;
  std::string source;  // file path for loaded matrices

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

/// i.i.d. N(0, 1/m) entries; deterministic given the seed.
MeasurementMatrix gen_gaussian(std::size_t m, std::size_t n, std::uint64_t seed);
/// i.i.d. +-1/sqrt(m) entries with equal probability.
MeasurementMatrix gen_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed);
MeasurementMatrix generate(Ensemble e, std::size_t m, std::size_t n, std::uint64_t seed);

/// Text format: `m n` on the first line, then m rows of n reals written in
/// shortest round-trip form.
void write_matrix(std::ostream& out, const Matrix& a);
Matrix read_matrix(std::istream& in);
MeasurementMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& a);

/// One real per line.
void write_vector(std::ostream& out, const Vector& v);
Vector read_vector(std::istream& in);
Vector load_vector(const std::string& path);
void save_vector(const std::string& path, const Vector& v);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_real(double v);

/// Certified group-RIP constants of one order.
struct GripCertificate {
  std::size_t order = 0;
  double rho_low = 0.0;
  double rho_high = 0.0;
  double delta = 0.0;
  std::size_t family_size = 0;
  std::uint64_t partition_hash = 0;

  /// rho_low > 0: A is injective on every group sparse support of this order.
  bool injective() const { return rho_low > 0.0; }
};

/// Extreme eigenvalues of A_L^T A_L over every member L of the order-`order`
/// family. Work is split across `threads` (0 = hardware concurrency); the
/// min/max reduction makes the result independent of the split.
GripCertificate certify_grip(const Matrix& a, const GroupPartition& partition, std::size_t order,
                             std::size_t cap = kDefaultEnumerationCap, unsigned threads = 0);

GripCertificate certify_grip(const Matrix& a, const GksFamily& family, unsigned threads = 0);

/// Key-value record: order, rho_low, rho_high, delta, family_size.
void write_certificate(std::ostream& out, const GripCertificate& cert);

struct CrossLemmaReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Largest |<Au, Av>| / (delta_2k ||u|| ||v||) seen (0 when delta_2k = 0).
  double worst_ratio = 0.0;
  /// Largest |<Au, Av>| - delta_2k ||u|| ||v||.
  double worst_excess = -std::numeric_limits<double>::infinity();
};

/// Samples u, v on disjoint members of the order-k family and checks
/// |<Au, Av>| <= delta_2k ||u||_2 ||v||_2 + 1e-12.
CrossLemmaReport check_cross_lemma(const Matrix& a, const GksFamily& family_k,
                                   const GripCertificate& cert_2k, std::size_t trials,
                                   std::uint64_t seed);

}  // namespace cskit
