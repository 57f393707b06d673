#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cskit/groups.hpp"

namespace cskit {

enum class NormKind { L1, GroupL2, SparseGroup, SortedL1, TreeStructured };

std::string_view to_string(NormKind kind);

/// Inner norm applied to one set of a tree-structured system.
enum class InnerNorm { L1, L2 };

struct TreeSet {
  Support set;
  InnerNorm inner = InnerNorm::L2;
  double weight = 1.0;
};

/// A penalty or approximation norm on R^n.
///
/// Group norms carry their partition; the sorted-l1 norm carries its weight
/// vector, which fixes n. The l1 norm is dimension free. Tree-structured
/// norms are a sum of weighted inner norms over a nested-or-disjoint set
/// system whose maximal sets partition {0, ..., n-1}.
class Norm {
 public:
  static Norm l1();
  static Norm group_l2(GroupPartition partition);
  /// sum_i (1 - mu) ||z_Gi||_1 + mu ||z_Gi||_2, with 0 <= mu <= 1.
  static Norm sparse_group(GroupPartition partition, double mu);
  /// Requires lambda_1 >= ... >= lambda_n > 0.
  static Norm sorted_l1(std::vector<double> lambda);
  static Norm tree(std::size_t n, std::vector<TreeSet> sets);

  NormKind kind() const noexcept;
  /// Fixed dimension, or nullopt for the l1 norm.
  std::optional<std::size_t> dim() const;
  std::string describe() const;

  double evaluate(const Vector& x) const;
  double operator()(const Vector& x) const { return evaluate(x); }

  /// Dual norm sup { <y, z> : ||z|| <= 1 }. Not available for tree norms.
  double dual(const Vector& y) const;

  /// argmin_z 1/2 ||z - v||_2^2 + t ||z||. Not available for tree norms.
  Vector prox(const Vector& v, double t) const;

  /// Constant gamma of gamma-decomposability: lambda_n / lambda_1 for the
  /// sorted-l1 norm and 1 for every other kind.
  double gamma() const;

  const GroupPartition* partition() const;
  double mu() const;
  const std::vector<double>& lambda() const;
  const std::vector<TreeSet>& tree_sets() const;
  /// Maximal sets of a tree-structured system as a partition.
  GroupPartition tree_partition() const;

 private:
  struct L1 {};
  struct GroupL2 { GroupPartition partition; };
  struct SparseGroup { GroupPartition partition; double mu; };
  struct Sorted { std::vector<double> lambda; };
  struct Tree {
    std::size_t n;
    std::vector<TreeSet> sets;
    GroupPartition maximal;
    std::vector<std::vector<std::size_t>> sets_by_group;
  };
  using Variant = std::variant<L1, GroupL2, SparseGroup, Sorted, Tree>;

  explicit Norm(Variant v) : v_(std::move(v)) {}
  void check_dim(const Vector& x) const;

  Variant v_;
};

Vector soft_threshold(const Vector& v, double t);

/// Sorted-l1 prox by a single stack-based pool-adjacent-violators pass over
/// the magnitudes sorted in decreasing order.
Vector prox_sorted_l1(const Vector& v, const std::vector<double>& lambda, double t);

/// Parses `l1 | gl | sgl:<mu> | slope:<lambda-file> | tree:<tree-file>`.
/// Group kinds require `partition`.
Norm parse_norm(std::string_view spec, const GroupPartition* partition);

std::vector<double> load_lambda(const std::string& path);

/// Tree file: one set per line, `<l1|l2> [*weight] idx idx ...`, '#' comments.
Norm load_tree_norm(const std::string& path);

// ----------------------------------------------------------- decomposability

struct DecomposabilityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Smallest observed ||u+v|| - ||u|| - gamma ||v||.
  double worst_slack = 0.0;
  /// gamma used; 1 with `strict` tests equality.
  double gamma = 1.0;
  bool strict = true;
};

/// Samples pairs (u, v) supported on disjoint family members. With no
/// `gamma`, checks ||u+v|| = ||u|| + ||v|| to 1e-12 relative; otherwise
/// checks ||u+v|| >= ||u|| + gamma ||v|| - 1e-12 (scaled by ||u|| + ||v||).
/// The first trials use constant-magnitude and one-hot candidates.
DecomposabilityReport check_decomposability(const Norm& norm, const GksFamily& family,
                                            std::size_t trials, std::uint64_t seed,
                                            std::optional<double> gamma = std::nullopt);

// ------------------------------------------------------------ pair constants

/// Constants a, b, c, d relating the approximation norm, the penalty norm and
/// the Euclidean norm over group k-sparse vectors, plus gamma and f.
struct NormPairConstants {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;
  double gamma = 1.0;
  std::optional<double> f;
  bool analytic = true;
};

struct EmpiricalMode {
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
};

/// Analytic values for (l1,l1), (gl,gl), (sgl,sgl) and (l1 approx, sorted-l1
/// penalty); throws unsupported-pair for anything else.
NormPairConstants pair_constants_analytic(const Norm& approx, const Norm& penalty,
                                          const GksFamily& family);

/// Sampled extrema: returned a and c never fall below the true minima, b and
/// d never exceed the true maxima. f is left empty.
NormPairConstants pair_constants_empirical(const Norm& approx, const Norm& penalty,
                                           const GksFamily& family, EmpiricalMode mode);

}  // namespace cskit
