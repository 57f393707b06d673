#include "cskit/sensing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cskit/error.hpp"

namespace cskit {

std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::Gaussian: return "gaussian";
    case Ensemble::Bernoulli: return "bernoulli";
    case Ensemble::Loaded: return "loaded";
  }
  return "unknown";
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "gaussian") return Ensemble::Gaussian;
  if (name == "bernoulli") return Ensemble::Bernoulli;
  throw Error(ErrorCode::Parse, "unknown ensemble '" + std::string(name) + "'");
}

MeasurementMatrix gen_gaussian(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  MeasurementMatrix out;
  out.entries.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  // Row-major fill so the stream order matches the file order.
  for (Eigen::Index i = 0; i < out.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < out.entries.cols(); ++j) out.entries(i, j) = normal(rng);
  out.provenance = Ensemble::Gaussian;
  out.seed = seed;
  return out;
}

MeasurementMatrix gen_bernoulli(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  std::mt19937_64 rng(seed);
  const double v = 1.0 / std::sqrt(static_cast<double>(m));
  MeasurementMatrix out;
  out.entries.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < out.entries.cols(); ++j)
      out.entries(i, j) = (rng() >> 63) ? v : -v;
  out.provenance = Ensemble::Bernoulli;
  out.seed = seed;
  return out;
}

MeasurementMatrix generate(Ensemble e, std::size_t m, std::size_t n, std::uint64_t seed) {
  switch (e) {
    case Ensemble::Gaussian: return gen_gaussian(m, n, seed);
    case Ensemble::Bernoulli: return gen_bernoulli(m, n, seed);
    case Ensemble::Loaded: break;
  }
  throw Error(ErrorCode::InvalidArgument, "cannot generate a loaded matrix");
}

// --------------------------------------------------------------------- io

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_real(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto res = std::from_chars(first, tok.data() + tok.size(), v);
  require(res.ec == std::errc() && res.ptr == tok.data() + tok.size(), ErrorCode::Parse,
          "bad real '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(tok);
  }
  return out;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out << (j ? " " : "") << format_real(a(i, j));
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  const auto tok = tokens(in);
  require(tok.size() >= 2, ErrorCode::Parse, "matrix file lacks a dimension line");
  long long m = 0, n = 0;
  try {
    m = std::stoll(tok[0]);
    n = std::stoll(tok[1]);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Parse, "bad matrix dimensions");
  }
  require(m >= 1 && n >= 1, ErrorCode::Parse, "matrix dimensions must be positive");
  require(tok.size() == 2 + static_cast<std::size_t>(m * n), ErrorCode::Parse,
          "matrix file has " + std::to_string(tok.size() - 2) + " entries, expected " +
              std::to_string(m * n));
  Matrix a(m, n);
  std::size_t t = 2;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = parse_real(tok[t++]);
      require(std::isfinite(a(i, j)), ErrorCode::Parse, "matrix entries must be finite");
    }
  return a;
}

MeasurementMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open matrix file " + path);
  MeasurementMatrix out;
  out.entries = read_matrix(in);
  out.provenance = Ensemble::Loaded;
  out.source = path;
  return out;
}

void save_matrix(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  write_matrix(out, a);
}

void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v[i]) << '\n';
}

Vector read_vector(std::istream& in) {
  const auto tok = tokens(in);
  Vector v(static_cast<Eigen::Index>(tok.size()));
  for (std::size_t i = 0; i < tok.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(tok[i]);
  return v;
}

Vector load_vector(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open vector file " + path);
  return read_vector(in);
}

void save_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  write_vector(out, v);
}

// ---------------------------------------------------------- certification

GripCertificate certify_grip(const Matrix& a, const GroupPartition& partition, std::size_t order,
                             std::size_t cap, unsigned threads) {
  return certify_grip(a, enumerate_gks(partition, order, cap), threads);
}

GripCertificate certify_grip(const Matrix& a, const GksFamily& family, unsigned threads) {
  require(static_cast<std::size_t>(a.cols()) == family.n(), ErrorCode::InvalidArgument,
          "matrix has " + std::to_string(a.cols()) + " columns, partition covers " +
              std::to_string(family.n()));
  require(!family.empty(), ErrorCode::InvalidArgument, "no group sparse support of this order");

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, (family.size() + 63) / 64));
  threads = std::max(1u, threads);

  struct Extremes {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
  };
  std::vector<Extremes> partial(threads);
  auto work = [&](unsigned t) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    Extremes& ex = partial[t];
    for (std::size_t j = t; j < family.size(); j += threads) {
      const auto& idx = family[j].set.indices();
      Matrix cols(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c)
        cols.col(static_cast<Eigen::Index>(c)) = a.col(static_cast<Eigen::Index>(idx[c]));
      const Matrix gram = cols.transpose() * cols;
      eig.compute(gram, Eigen::EigenvaluesOnly);
      const auto& ev = eig.eigenvalues();
      ex.lo = std::min(ex.lo, ev.minCoeff());
      ex.hi = std::max(ex.hi, ev.maxCoeff());
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  GripCertificate cert;
  cert.order = family.k();
  cert.rho_low = std::numeric_limits<double>::infinity();
  cert.rho_high = -std::numeric_limits<double>::infinity();
  for (const auto& ex : partial) {
    cert.rho_low = std::min(cert.rho_low, ex.lo);
    cert.rho_high = std::max(cert.rho_high, ex.hi);
  }
  cert.delta = (cert.rho_high - cert.rho_low) / 2.0;
  cert.family_size = family.size();
  cert.partition_hash = family.partition().hash();
  return cert;
}

void write_certificate(std::ostream& out, const GripCertificate& cert) {
  out << "order = " << cert.order << '\n'
      << "rho_low = " << format_real(cert.rho_low) << '\n'
      << "rho_high = " << format_real(cert.rho_high) << '\n'
      << "delta = " << format_real(cert.delta) << '\n'
      << "family_size = " << cert.family_size << '\n';
}

CrossLemmaReport check_cross_lemma(const Matrix& a, const GksFamily& family_k,
                                   const GripCertificate& cert_2k, std::size_t trials,
                                   std::uint64_t seed) {
  require(static_cast<std::size_t>(a.cols()) == family_k.n(), ErrorCode::InvalidArgument,
          "matrix and family dimensions differ");
  require(cert_2k.order == 2 * family_k.k(), ErrorCode::InvalidArgument,
          "cross lemma needs a certificate of order 2k");
  require(family_k.has_disjoint_pair(), ErrorCode::NotTestable,
          "family has no two disjoint members");
  CrossLemmaReport report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> pick(0, family_k.size() - 1);
  const Eigen::Index n = a.cols();
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t iu = pick(rng);
    auto partners = family_k.disjoint_from(iu);
    while (partners.empty()) {
      iu = pick(rng);
      partners = family_k.disjoint_from(iu);
    }
    const std::size_t iv =
        partners[std::uniform_int_distribution<std::size_t>(0, partners.size() - 1)(rng)];
    Vector u = Vector::Zero(n), v = Vector::Zero(n);
    for (Index i : family_k[iu].set) u[static_cast<Eigen::Index>(i)] = normal(rng);
    for (Index i : family_k[iv].set) v[static_cast<Eigen::Index>(i)] = normal(rng);
    u.normalize();
    v.normalize();
    const double lhs = std::abs((a * u).dot(a * v));
    const double rhs = cert_2k.delta;
    if (lhs > rhs + 1e-12) ++report.violations;
    report.worst_excess = std::max(report.worst_excess, lhs - rhs);
    if (rhs > 0.0) report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
    ++report.trials;
  }
  return report;
}

}  // namespace cskit
