#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cskit {

using Index = std::size_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted, duplicate-free set of positions in {0, ..., n-1}.
class Support {
 public:
  Support() = default;
  /// Sorts and deduplicates `indices`.
  explicit Support(std::vector<Index> indices);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index i) const;
  bool includes(const Support& other) const;
  bool disjoint(const Support& other) const;
  Support united(const Support& other) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const Support&, const Support&) = default;
  friend auto operator<=>(const Support& a, const Support& b) { return a.indices_ <=> b.indices_; }

 private:
  std::vector<Index> indices_;
};

/// Positions of the nonzero entries of `x`.
Support support_of(const Vector& x);

/// x restricted to `s` (zero elsewhere).
Vector restrict_to(const Vector& x, const Support& s);

/// x with the entries in `s` zeroed.
Vector restrict_to_complement(const Vector& x, const Support& s);

/// A disjoint cover of {0, ..., n-1} by non-empty groups.
class GroupPartition {
 public:
  GroupPartition(std::size_t n, std::vector<std::vector<Index>> groups);

  static GroupPartition singletons(std::size_t n);
  /// Consecutive groups of `group_size`; the last group takes any remainder.
  static GroupPartition contiguous(std::size_t n, std::size_t group_size);

  std::size_t n() const noexcept { return n_; }
  std::size_t num_groups() const noexcept { return groups_.size(); }
  const std::vector<Index>& group(std::size_t i) const { return groups_.at(i); }
  const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }
  std::size_t group_of(Index i) const { return owner_.at(i); }

  std::size_t l_min() const;
  std::size_t l_max() const;
  /// floor(k / l_min): the most groups a group k-sparse set can hold.
  std::size_t s_max(std::size_t k) const;
  bool all_singletons() const noexcept { return groups_.size() == n_; }

  /// FNV-1a over the group lists; identifies a partition in certificates.
  std::uint64_t hash() const;

  friend bool operator==(const GroupPartition& a, const GroupPartition& b) {
    return a.n_ == b.n_ && a.groups_ == b.groups_;
  }

 private:
  std::size_t n_;
  std::vector<std::vector<Index>> groups_;
  std::vector<std::size_t> owner_;
};

/// Parses the partition text format: one group per line, whitespace separated
/// zero-based indices, '#' starts a comment. n is the largest index plus one.
GroupPartition parse_partition(std::istream& in);
GroupPartition load_partition(const std::string& path);
void write_partition(std::ostream& out, const GroupPartition& p);

/// One member of a GkS family: the index set and the groups it is built from.
struct GksMember {
  Support set;
  std::vector<std::size_t> group_ids;  // ascending
};

/// All non-empty unions of complete groups with cardinality <= k, in
/// lexicographic order of their index lists.
class GksFamily {
 public:
  GksFamily(std::size_t k, GroupPartition partition, std::vector<GksMember> members);

  std::size_t k() const noexcept { return k_; }
  const GroupPartition& partition() const noexcept { return partition_; }
  std::size_t n() const noexcept { return partition_.n(); }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const GksMember& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<GksMember>& members() const noexcept { return members_; }

  /// Indices of members sharing no group with member `i`.
  std::vector<std::size_t> disjoint_from(std::size_t i) const;
  bool has_disjoint_pair() const;

 private:
  std::size_t k_;
  GroupPartition partition_;
  std::vector<GksMember> members_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Number of non-empty group subsets with total size <= k (saturating).
std::uint64_t predicted_family_size(const GroupPartition& partition, std::size_t k);

GksFamily enumerate_gks(const GroupPartition& partition, std::size_t k,
                        std::size_t cap = kDefaultEnumerationCap);

/// supp(x) is contained in some member of `family`.
bool is_group_k_sparse(const Vector& x, const GksFamily& family);

}  // namespace cskit
