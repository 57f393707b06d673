#include "cskit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "cskit/error.hpp"

namespace cskit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double block_l2(const Vector& x, const std::vector<Index>& g) {
  double s = 0.0;
  for (Index i : g) s += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
  return std::sqrt(s);
}

double block_l1(const Vector& x, const std::vector<Index>& g) {
  double s = 0.0;
  for (Index i : g) s += std::abs(x[static_cast<Eigen::Index>(i)]);
  return s;
}

double set_norm(const Vector& x, const TreeSet& s) {
  return s.weight * (s.inner == InnerNorm::L1 ? block_l1(x, s.set.indices())
                                              : block_l2(x, s.set.indices()));
}

// Indices ordered by decreasing magnitude; ties keep index order.
std::vector<Index> magnitude_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&v](Index a, Index b) {
    return std::abs(v[static_cast<Eigen::Index>(a)]) > std::abs(v[static_cast<Eigen::Index>(b)]);
  });
  return order;
}

// Dual of (1-mu)||.||_1 + mu ||.||_2 on one block: the smallest s with
// ||soft(y, (1-mu) s)||_2 <= mu s.
double sgl_block_dual(const Vector& y, double mu) {
  const double linf = y.cwiseAbs().maxCoeff();
  const double l2 = y.norm();
  if (linf == 0.0) return 0.0;
  if (mu <= 0.0) return linf;
  if (mu >= 1.0) return l2;
  double lo = 0.0;
  double hi = std::min(linf / (1.0 - mu), l2 / mu);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double s = 0.5 * (lo + hi);
    if (soft_threshold(y, (1.0 - mu) * s).norm() <= mu * s) hi = s; else lo = s;
  }
  return hi;
}

}  // namespace

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::GroupL2: return "gl";
    case NormKind::SparseGroup: return "sgl";
    case NormKind::SortedL1: return "slope";
    case NormKind::TreeStructured: return "tree";
  }
  return "unknown";
}

// ------------------------------------------------------------ construction

Norm Norm::l1() { return Norm(L1{}); }

Norm Norm::group_l2(GroupPartition partition) { return Norm(GroupL2{std::move(partition)}); }

Norm Norm::sparse_group(GroupPartition partition, double mu) {
  require(mu >= 0.0 && mu <= 1.0, ErrorCode::InvalidArgument,
          "sparse-group mixing weight must lie in [0, 1]");
  return Norm(SparseGroup{std::move(partition), mu});
}

Norm Norm::sorted_l1(std::vector<double> lambda) {
  require(!lambda.empty(), ErrorCode::InvalidArgument, "sorted-l1 weights are empty");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    require(std::isfinite(lambda[i]) && lambda[i] > 0.0, ErrorCode::InvalidArgument,
            "sorted-l1 weights must be positive");
    require(i == 0 || lambda[i] <= lambda[i - 1], ErrorCode::InvalidArgument,
            "sorted-l1 weights must be non-increasing");
  }
  return Norm(Sorted{std::move(lambda)});
}

Norm Norm::tree(std::size_t n, std::vector<TreeSet> sets) {
  require(!sets.empty(), ErrorCode::InvalidArgument, "tree norm has no sets");
  for (const auto& s : sets) {
    require(!s.set.empty(), ErrorCode::InvalidArgument, "tree norm set is empty");
    require(s.set.indices().back() < n, ErrorCode::InvalidArgument, "tree norm index out of range");
    require(s.weight > 0.0, ErrorCode::InvalidArgument, "tree norm weights must be positive");
  }
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      const auto& a = sets[i].set;
      const auto& b = sets[j].set;
      require(a.disjoint(b) || a.includes(b) || b.includes(a), ErrorCode::InvalidArgument,
              "tree norm sets " + std::to_string(i) + " and " + std::to_string(j) +
                  " overlap without nesting");
    }
  std::vector<Support> maximal;
  for (const auto& s : sets) {
    bool dominated = false;
    for (const auto& t : sets)
      if (t.set.size() > s.set.size() && t.set.includes(s.set)) { dominated = true; break; }
    if (!dominated && std::find(maximal.begin(), maximal.end(), s.set) == maximal.end())
      maximal.push_back(s.set);
  }
  std::sort(maximal.begin(), maximal.end());
  std::vector<std::vector<Index>> groups;
  for (const auto& m : maximal) groups.push_back(m.indices());
  GroupPartition partition(n, std::move(groups));  // throws unless the maximal sets cover n
  std::vector<std::vector<std::size_t>> by_group(partition.num_groups());
  for (std::size_t j = 0; j < sets.size(); ++j)
    by_group[partition.group_of(sets[j].set.indices().front())].push_back(j);
  return Norm(Tree{n, std::move(sets), std::move(partition), std::move(by_group)});
}

// -------------------------------------------------------------- accessors

NormKind Norm::kind() const noexcept {
  return static_cast<NormKind>(v_.index());
}

std::optional<std::size_t> Norm::dim() const {
  return std::visit(overloaded{
                        [](const L1&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const GroupL2& g) -> std::optional<std::size_t> { return g.partition.n(); },
                        [](const SparseGroup& g) -> std::optional<std::size_t> {
                          return g.partition.n();
                        },
                        [](const Sorted& s) -> std::optional<std::size_t> { return s.lambda.size(); },
                        [](const Tree& t) -> std::optional<std::size_t> { return t.n; },
                    },
                    v_);
}

std::string Norm::describe() const {
  std::ostringstream os;
  os << to_string(kind());
  if (kind() == NormKind::SparseGroup) os << ':' << mu();
  return os.str();
}

const GroupPartition* Norm::partition() const {
  if (auto* g = std::get_if<GroupL2>(&v_)) return &g->partition;
  if (auto* g = std::get_if<SparseGroup>(&v_)) return &g->partition;
  if (auto* t = std::get_if<Tree>(&v_)) return &t->maximal;
  return nullptr;
}

double Norm::mu() const {
  if (auto* g = std::get_if<SparseGroup>(&v_)) return g->mu;
  throw Error(ErrorCode::InvalidArgument, "norm has no mixing weight");
}

const std::vector<double>& Norm::lambda() const {
  if (auto* s = std::get_if<Sorted>(&v_)) return s->lambda;
  throw Error(ErrorCode::InvalidArgument, "norm has no sorted-l1 weights");
}

const std::vector<TreeSet>& Norm::tree_sets() const {
  if (auto* t = std::get_if<Tree>(&v_)) return t->sets;
  throw Error(ErrorCode::InvalidArgument, "norm is not tree-structured");
}

GroupPartition Norm::tree_partition() const {
  if (auto* t = std::get_if<Tree>(&v_)) return t->maximal;
  throw Error(ErrorCode::InvalidArgument, "norm is not tree-structured");
}

void Norm::check_dim(const Vector& x) const {
  if (auto n = dim())
    require(static_cast<std::size_t>(x.size()) == *n, ErrorCode::InvalidArgument,
            "vector length " + std::to_string(x.size()) + " does not match norm dimension " +
                std::to_string(*n));
}

// ------------------------------------------------------------- evaluation

double Norm::evaluate(const Vector& x) const {
  check_dim(x);
  return std::visit(
      overloaded{
          [&](const L1&) { return x.lpNorm<1>(); },
          [&](const GroupL2& g) {
            double s = 0.0;
            for (const auto& grp : g.partition.groups()) s += block_l2(x, grp);
            return s;
          },
          [&](const SparseGroup& g) {
            double s = 0.0;
            for (const auto& grp : g.partition.groups())
              s += (1.0 - g.mu) * block_l1(x, grp) + g.mu * block_l2(x, grp);
            return s;
          },
          [&](const Sorted& s) {
            const auto order = magnitude_order(x);
            double acc = 0.0;
            for (std::size_t i = 0; i < order.size(); ++i)
              acc += s.lambda[i] * std::abs(x[static_cast<Eigen::Index>(order[i])]);
            return acc;
          },
          [&](const Tree& t) {
            // Sum of per-maximal-set blocks; each block only sees its own set.
            double acc = 0.0;
            for (const auto& members : t.sets_by_group) {
              double block = 0.0;
              for (std::size_t j : members) block += set_norm(x, t.sets[j]);
              acc += block;
            }
            return acc;
          },
      },
      v_);
}

double Norm::dual(const Vector& y) const {
  check_dim(y);
  return std::visit(
      overloaded{
          [&](const L1&) { return y.size() ? y.cwiseAbs().maxCoeff() : 0.0; },
          [&](const GroupL2& g) {
            double m = 0.0;
            for (const auto& grp : g.partition.groups()) m = std::max(m, block_l2(y, grp));
            return m;
          },
          [&](const SparseGroup& g) {
            double m = 0.0;
            for (const auto& grp : g.partition.groups()) {
              Vector block(static_cast<Eigen::Index>(grp.size()));
              for (std::size_t j = 0; j < grp.size(); ++j)
                block[static_cast<Eigen::Index>(j)] = y[static_cast<Eigen::Index>(grp[j])];
              m = std::max(m, sgl_block_dual(block, g.mu));
            }
            return m;
          },
          [&](const Sorted& s) {
            const auto order = magnitude_order(y);
            double num = 0.0, den = 0.0, m = 0.0;
            for (std::size_t i = 0; i < order.size(); ++i) {
              num += std::abs(y[static_cast<Eigen::Index>(order[i])]);
              den += s.lambda[i];
              m = std::max(m, num / den);
            }
            return m;
          },
          [&](const Tree&) -> double {
            throw Error(ErrorCode::UnsupportedNorm, "dual norm of a tree-structured norm");
          },
      },
      v_);
}

double Norm::gamma() const {
  if (auto* s = std::get_if<Sorted>(&v_)) return s->lambda.back() / s->lambda.front();
  return 1.0;
}

// ------------------------------------------------------------------- prox

Vector soft_threshold(const Vector& v, double t) {
  return v.unaryExpr([t](double a) { return std::copysign(std::max(std::abs(a) - t, 0.0), a); });
}

namespace {

void shrink_groups(Vector& z, const GroupPartition& p, double t) {
  for (const auto& grp : p.groups()) {
    const double nrm = block_l2(z, grp);
    const double scale = nrm > t ? 1.0 - t / nrm : 0.0;
    for (Index i : grp) z[static_cast<Eigen::Index>(i)] *= scale;
  }
}

}  // namespace

Vector prox_sorted_l1(const Vector& v, const std::vector<double>& lambda, double t) {
  const std::size_t n = static_cast<std::size_t>(v.size());
  require(lambda.size() == n, ErrorCode::InvalidArgument, "sorted-l1 weight length mismatch");
  const auto order = magnitude_order(v);

  struct Block {
    std::size_t first, last;
    double sum;
    double mean;
  };
  std::vector<Block> stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::abs(v[static_cast<Eigen::Index>(order[i])]) - t * lambda[i];
    stack.push_back({i, i, w, w});
    while (stack.size() > 1 && stack[stack.size() - 2].mean <= stack.back().mean) {
      Block top = stack.back();
      stack.pop_back();
      Block& below = stack.back();
      below.last = top.last;
      below.sum += top.sum;
      below.mean = below.sum / static_cast<double>(below.last - below.first + 1);
    }
  }
  Vector out(v.size());
  for (const auto& b : stack) {
    const double mag = std::max(b.mean, 0.0);
    for (std::size_t i = b.first; i <= b.last; ++i) {
      const auto idx = static_cast<Eigen::Index>(order[i]);
      out[idx] = std::copysign(mag, v[idx]);
    }
  }
  // copysign(0, -x) leaves -0.0; normalise for clean supports.
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (out[i] == 0.0) out[i] = 0.0;
  return out;
}

Vector Norm::prox(const Vector& v, double t) const {
  require(t > 0.0, ErrorCode::InvalidArgument, "prox step must be positive");
  check_dim(v);
  return std::visit(overloaded{
                        [&](const L1&) { return soft_threshold(v, t); },
                        [&](const GroupL2& g) {
                          Vector z = v;
                          shrink_groups(z, g.partition, t);
                          return z;
                        },
                        [&](const SparseGroup& g) {
                          Vector z = soft_threshold(v, (1.0 - g.mu) * t);
                          shrink_groups(z, g.partition, g.mu * t);
                          return z;
                        },
                        [&](const Sorted& s) { return prox_sorted_l1(v, s.lambda, t); },
                        [&](const Tree&) -> Vector {
                          throw Error(ErrorCode::UnsupportedNorm,
                                      "prox of a tree-structured norm");
                        },
                    },
                    v_);
}

// ---------------------------------------------------------------- parsing

std::vector<double> load_lambda(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open lambda file " + path);
  std::vector<double> lambda;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    while (ls >> v) lambda.push_back(v);
    require(ls.eof(), ErrorCode::Parse, "bad value in lambda file " + path);
  }
  return lambda;
}

Norm load_tree_norm(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open tree file " + path);
  std::vector<TreeSet> sets;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    TreeSet s;
    if (tag == "l1") s.inner = InnerNorm::L1;
    else if (tag == "l2") s.inner = InnerNorm::L2;
    else throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": unknown tag " + tag);
    std::vector<Index> idx;
    std::string tok;
    while (ls >> tok) {
      try {
        if (tok.front() == '*') {
          s.weight = std::stod(tok.substr(1));
        } else {
          require(tok.front() != '-', ErrorCode::Parse, "negative index");
          idx.push_back(std::stoull(tok));
          n = std::max(n, idx.back() + 1);
        }
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad token " + tok);
      }
    }
    s.set = Support(std::move(idx));
    sets.push_back(std::move(s));
  }
  return Norm::tree(n, std::move(sets));
}

Norm parse_norm(std::string_view spec, const GroupPartition* partition) {
  const auto colon = spec.find(':');
  const std::string head(spec.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  auto need_partition = [&]() -> const GroupPartition& {
    require(partition != nullptr, ErrorCode::InvalidArgument,
            "norm '" + head + "' needs a partition");
    return *partition;
  };
  if (head == "l1") return Norm::l1();
  if (head == "gl") return Norm::group_l2(need_partition());
  if (head == "sgl") {
    double mu = 0.5;
    try {
      std::size_t pos = 0;
      mu = std::stod(arg, &pos);
      require(pos == arg.size(), ErrorCode::Parse, "bad mixing weight " + arg);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::Parse, "bad mixing weight '" + arg + "'");
    }
    return Norm::sparse_group(need_partition(), mu);
  }
  if (head == "slope") return Norm::sorted_l1(load_lambda(arg));
  if (head == "tree") return load_tree_norm(arg);
  throw Error(ErrorCode::Parse, "unknown norm '" + std::string(spec) + "'");
}

// -------------------------------------------------------- decomposability

DecomposabilityReport check_decomposability(const Norm& norm, const GksFamily& family,
                                            std::size_t trials, std::uint64_t seed,
                                            std::optional<double> gamma) {
  require(trials > 0, ErrorCode::InvalidArgument, "trials must be positive");
  require(family.has_disjoint_pair(), ErrorCode::NotTestable,
          "family has no two disjoint members");
  DecomposabilityReport report;
  report.strict = !gamma.has_value();
  report.gamma = gamma.value_or(1.0);
  report.worst_slack = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.25, 4.0);
  std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
  const auto n = static_cast<Eigen::Index>(family.n());
  const std::size_t structured = std::max<std::size_t>(1, trials / 10);

  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t iu = pick(rng);
    auto partners = family.disjoint_from(iu);
    while (partners.empty()) {
      iu = pick(rng);
      partners = family.disjoint_from(iu);
    }
    const std::size_t iv =
        partners[std::uniform_int_distribution<std::size_t>(0, partners.size() - 1)(rng)];
    Vector u = Vector::Zero(n), v = Vector::Zero(n);
    if (t < structured) {
      const double sv = scale(rng);
      for (Index i : family[iu].set) u[static_cast<Eigen::Index>(i)] = rng() & 1 ? 1.0 : -1.0;
      for (Index i : family[iv].set) v[static_cast<Eigen::Index>(i)] = rng() & 1 ? sv : -sv;
    } else {
      for (Index i : family[iu].set) u[static_cast<Eigen::Index>(i)] = normal(rng);
      for (Index i : family[iv].set) v[static_cast<Eigen::Index>(i)] = normal(rng);
    }
    const double nu = norm(u), nv = norm(v), nuv = norm(Vector(u + v));
    const double slack = nuv - nu - report.gamma * nv;
    const double tol = 1e-12 * std::max(1.0, nu + nv);
    const bool bad = report.strict ? std::abs(slack) > tol : slack < -tol;
    if (bad) ++report.violations;
    report.worst_slack = std::min(report.worst_slack, slack);
    ++report.trials;
  }
  return report;
}

// --------------------------------------------------------- pair constants

NormPairConstants pair_constants_analytic(const Norm& approx, const Norm& penalty,
                                          const GksFamily& family) {
  const double k = static_cast<double>(family.k());
  const GroupPartition& p = family.partition();
  NormPairConstants out;
  out.analytic = true;
  out.gamma = penalty.gamma();
  out.c = 1.0;

  auto same_partition = [&](const Norm& nm) {
    require(nm.partition() && *nm.partition() == p, ErrorCode::UnsupportedPair,
            "group norm partition differs from the family partition");
  };

  const auto ak = approx.kind();
  const auto pk = penalty.kind();
  if (ak == NormKind::L1 && pk == NormKind::L1) {
    out.a = out.b = 1.0;
    out.d = std::sqrt(k);
  } else if (ak == NormKind::GroupL2 && pk == NormKind::GroupL2) {
    same_partition(approx);
    same_partition(penalty);
    out.a = out.b = 1.0;
    out.d = std::sqrt(static_cast<double>(p.s_max(family.k())));
  } else if (ak == NormKind::SparseGroup && pk == NormKind::SparseGroup &&
             approx.mu() == penalty.mu()) {
    same_partition(approx);
    same_partition(penalty);
    out.a = out.b = 1.0;
    const double mu = approx.mu();
    const double smax = static_cast<double>(p.s_max(family.k()));
    // ||z||_1 <= sqrt(|supp|) ||z||_2 and |supp| <= min(k, l_max s_max).
    const double largest = std::min(k, static_cast<double>(p.l_max()) * smax);
    out.d = (1.0 - mu) * std::sqrt(largest) + mu * std::sqrt(smax);
  } else if (ak == NormKind::L1 && pk == NormKind::SortedL1) {
    const auto& lambda = penalty.lambda();
    out.a = 1.0 / lambda.front();
    out.b = 1.0 / lambda.back();
    out.d = std::sqrt(k);
  } else {
    throw Error(ErrorCode::UnsupportedPair,
                "no closed form for approximation " + approx.describe() + " with penalty " +
                    penalty.describe());
  }
  // The blockwise argument gives f = sqrt(k) for singleton groups; otherwise
  // the bound sum_{j>=1} ||h_j||_2 <= ||h||_A / c already yields f = c.
  out.f = p.all_singletons() ? std::sqrt(k) : out.c;
  return out;
}

NormPairConstants pair_constants_empirical(const Norm& approx, const Norm& penalty,
                                           const GksFamily& family, EmpiricalMode mode) {
  require(!family.empty(), ErrorCode::InvalidArgument, "empty family");
  const auto n = static_cast<Eigen::Index>(family.n());
  NormPairConstants out;
  out.analytic = false;
  out.gamma = penalty.gamma();
  double a = std::numeric_limits<double>::infinity();
  double b = 0.0, d = 0.0;
  double c = std::numeric_limits<double>::infinity();

  auto on_member = [&](const Vector& x) {
    const double na = approx(x), np = penalty(x), n2 = x.norm();
    if (n2 == 0.0) return;
    a = std::min(a, na / np);
    b = std::max(b, na / np);
    c = std::min(c, na / n2);
    d = std::max(d, na / n2);
  };
  auto anywhere = [&](const Vector& x) {
    if (x.norm() == 0.0) return;
    a = std::min(a, approx(x) / penalty(x));
  };

  std::mt19937_64 rng(mode.seed);
  std::normal_distribution<double> normal;

  for (Eigen::Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    if (is_group_k_sparse(e, family)) on_member(e); else anywhere(e);
  }
  anywhere(Vector::Ones(n));
  const std::size_t stride = std::max<std::size_t>(1, family.size() / 2000);
  for (std::size_t j = 0; j < family.size(); j += stride) {
    Vector x = Vector::Zero(n);
    for (Index i : family[j].set) x[static_cast<Eigen::Index>(i)] = 1.0;
    on_member(x);
    // Equal group l2 norms, uneven group sizes.
    Vector y = Vector::Zero(n);
    for (std::size_t g : family[j].group_ids) {
      const auto& grp = family.partition().group(g);
      for (Index i : grp)
        y[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(static_cast<double>(grp.size()));
    }
    on_member(y);
  }
  std::uniform_int_distribution<std::size_t> pick(0, family.size() - 1);
  for (std::size_t t = 0; t < mode.trials; ++t) {
    Vector x = Vector::Zero(n);
    for (Index i : family[pick(rng)].set) x[static_cast<Eigen::Index>(i)] = normal(rng);
    on_member(x);
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    anywhere(z);
  }
  out.a = a;
  out.b = b;
  out.c = c;
  out.d = d;
  return out;
}

}  // namespace cskit
