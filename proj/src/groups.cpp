#include "cskit/groups.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cskit/error.hpp"

namespace cskit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EnumerationTooLarge: return "enumeration-too-large";
    case ErrorCode::DecompositionStalled: return "decomposition-stalled";
    case ErrorCode::UnsupportedNorm: return "unsupported-norm";
    case ErrorCode::UnsupportedPair: return "unsupported-pair";
    case ErrorCode::NotTestable: return "not-testable";
    case ErrorCode::NotCompressible: return "not-compressible";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Support

Support::Support(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

bool Support::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool Support::includes(const Support& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

bool Support::disjoint(const Support& other) const {
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a == *b) return false;
    if (*a < *b) ++a; else ++b;
  }
  return true;
}

Support Support::united(const Support& other) const {
  std::vector<Index> out;
  out.reserve(size() + other.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  Support s;
  s.indices_ = std::move(out);
  return s;
}

Support support_of(const Vector& x) {
  std::vector<Index> idx;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) idx.push_back(static_cast<Index>(i));
  return Support(std::move(idx));
}

Vector restrict_to(const Vector& x, const Support& s) {
  Vector out = Vector::Zero(x.size());
  for (Index i : s) out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)];
  return out;
}

Vector restrict_to_complement(const Vector& x, const Support& s) {
  Vector out = x;
  for (Index i : s) out[static_cast<Eigen::Index>(i)] = 0.0;
  return out;
}

// ---------------------------------------------------------- GroupPartition

GroupPartition::GroupPartition(std::size_t n, std::vector<std::vector<Index>> groups)
    : n_(n), groups_(std::move(groups)), owner_(n, std::numeric_limits<std::size_t>::max()) {
  require(n_ >= 1, ErrorCode::InvalidArgument, "partition dimension must be positive");
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    auto& grp = groups_[g];
    require(!grp.empty(), ErrorCode::InvalidArgument, "group " + std::to_string(g) + " is empty");
    std::sort(grp.begin(), grp.end());
    for (Index i : grp) {
      require(i < n_, ErrorCode::InvalidArgument,
              "index " + std::to_string(i) + " out of range for n = " + std::to_string(n_));
      require(owner_[i] == std::numeric_limits<std::size_t>::max(), ErrorCode::InvalidArgument,
              "index " + std::to_string(i) + " appears in more than one group");
      owner_[i] = g;
    }
  }
  for (Index i = 0; i < n_; ++i)
    require(owner_[i] != std::numeric_limits<std::size_t>::max(), ErrorCode::InvalidArgument,
            "index " + std::to_string(i) + " is not covered by any group");
}

GroupPartition GroupPartition::singletons(std::size_t n) {
  std::vector<std::vector<Index>> groups(n);
  for (Index i = 0; i < n; ++i) groups[i] = {i};
  return GroupPartition(n, std::move(groups));
}

GroupPartition GroupPartition::contiguous(std::size_t n, std::size_t group_size) {
  require(group_size >= 1, ErrorCode::InvalidArgument, "group size must be positive");
  std::vector<std::vector<Index>> groups;
  for (Index start = 0; start < n; start += group_size) {
    std::vector<Index> g;
    for (Index i = start; i < std::min(n, start + group_size); ++i) g.push_back(i);
    groups.push_back(std::move(g));
  }
  if (groups.size() > 1 && groups.back().size() < group_size) {
    auto tail = std::move(groups.back());
    groups.pop_back();
    groups.back().insert(groups.back().end(), tail.begin(), tail.end());
  }
  return GroupPartition(n, std::move(groups));
}

std::size_t GroupPartition::l_min() const {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups_) m = std::min(m, g.size());
  return m;
}

std::size_t GroupPartition::l_max() const {
  std::size_t m = 0;
  for (const auto& g : groups_) m = std::max(m, g.size());
  return m;
}

std::size_t GroupPartition::s_max(std::size_t k) const { return k / l_min(); }

std::uint64_t GroupPartition::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(n_);
  for (const auto& g : groups_) {
    mix(g.size());
    for (Index i : g) mix(i);
  }
  return h;
}

GroupPartition parse_partition(std::istream& in) {
  std::vector<std::vector<Index>> groups;
  std::string line;
  std::size_t lineno = 0;
  Index max_index = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<Index> g;
    std::string tok;
    while (ls >> tok) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        if (tok.front() == '-') throw std::invalid_argument(tok);
        v = std::stoull(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      require(pos == tok.size() && pos > 0, ErrorCode::Parse,
              "line " + std::to_string(lineno) + ": bad index '" + tok + "'");
      g.push_back(static_cast<Index>(v));
      max_index = std::max<Index>(max_index, v);
      any = true;
    }
    if (!g.empty()) groups.push_back(std::move(g));
  }
  require(any, ErrorCode::Parse, "partition has no groups");
  return GroupPartition(max_index + 1, std::move(groups));
}

GroupPartition load_partition(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open partition file " + path);
  return parse_partition(in);
}

void write_partition(std::ostream& out, const GroupPartition& p) {
  for (const auto& g : p.groups()) {
    for (std::size_t j = 0; j < g.size(); ++j) out << (j ? " " : "") << g[j];
    out << '\n';
  }
}

// -------------------------------------------------------------- GksFamily

GksFamily::GksFamily(std::size_t k, GroupPartition partition, std::vector<GksMember> members)
    : k_(k), partition_(std::move(partition)), members_(std::move(members)) {}

std::vector<std::size_t> GksFamily::disjoint_from(std::size_t i) const {
  std::vector<bool> used(partition_.num_groups(), false);
  for (std::size_t g : members_.at(i).group_ids) used[g] = true;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < members_.size(); ++j) {
    bool ok = true;
    for (std::size_t g : members_[j].group_ids)
      if (used[g]) { ok = false; break; }
    if (ok) out.push_back(j);
  }
  return out;
}

bool GksFamily::has_disjoint_pair() const {
  // Two distinct usable groups exist iff some disjoint pair exists.
  std::size_t usable = 0;
  for (const auto& g : partition_.groups())
    if (g.size() <= k_) ++usable;
  return usable >= 2;
}

std::uint64_t predicted_family_size(const GroupPartition& partition, std::size_t k) {
  // count[s] = number of group subsets with total cardinality s.
  constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> count(k + 1, 0);
  count[0] = 1;
  for (const auto& g : partition.groups()) {
    const std::size_t w = g.size();
    if (w > k) continue;
    for (std::size_t s = k; s >= w; --s) {
      const std::uint64_t add = count[s - w];
      count[s] = (count[s] > kSat - add) ? kSat : count[s] + add;
      if (s == w) break;
    }
  }
  std::uint64_t total = 0;
  for (std::size_t s = 1; s <= k; ++s) total = (total > kSat - count[s]) ? kSat : total + count[s];
  return total;
}

namespace {

void enumerate_rec(const GroupPartition& p, std::size_t k, std::size_t next, std::size_t size,
                   std::vector<std::size_t>& chosen, std::vector<GksMember>& out) {
  for (std::size_t g = next; g < p.num_groups(); ++g) {
    const std::size_t w = p.group(g).size();
    if (size + w > k) continue;
    chosen.push_back(g);
    std::vector<Index> idx;
    idx.reserve(size + w);
    for (std::size_t c : chosen) idx.insert(idx.end(), p.group(c).begin(), p.group(c).end());
    out.push_back(GksMember{Support(std::move(idx)), chosen});
    enumerate_rec(p, k, g + 1, size + w, chosen, out);
    chosen.pop_back();
  }
}

}  // namespace

GksFamily enumerate_gks(const GroupPartition& partition, std::size_t k, std::size_t cap) {
  require(k >= 1, ErrorCode::InvalidArgument, "sparsity order k must be positive");
  const std::uint64_t predicted = predicted_family_size(partition, k);
  require(predicted <= cap, ErrorCode::EnumerationTooLarge,
          "family of order " + std::to_string(k) + " would have " + std::to_string(predicted) +
              " members (cap " + std::to_string(cap) + ")");
  std::vector<GksMember> members;
  members.reserve(predicted);
  std::vector<std::size_t> chosen;
  enumerate_rec(partition, k, 0, 0, chosen, members);
  std::sort(members.begin(), members.end(),
            [](const GksMember& a, const GksMember& b) { return a.set < b.set; });
  return GksFamily(k, partition, std::move(members));
}

bool is_group_k_sparse(const Vector& x, const GksFamily& family) {
  require(static_cast<std::size_t>(x.size()) == family.n(), ErrorCode::InvalidArgument,
          "vector length does not match partition dimension");
  const Support s = support_of(x);
  if (s.empty()) return true;
  for (const auto& m : family.members())
    if (m.set.includes(s)) return true;
  return false;
}

}  // namespace cskit
