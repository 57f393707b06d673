#include "cskit/solver.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>
#include <json.hpp>

#include "cskit/error.hpp"

namespace cskit {

Vector project_ball(const Vector& v, const Vector& center, double radius) {
  require(v.size() == center.size(), ErrorCode::InvalidArgument, "dimension mismatch");
  require(radius >= 0.0, ErrorCode::InvalidArgument, "radius must be non-negative");
  const Vector diff = v - center;
  const double dist = diff.norm();
  if (dist <= radius) return v;
  return center + (radius / dist) * diff;
}

double operator_norm(const Matrix& a, std::size_t iters, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  if (v.norm() == 0.0) return 0.0;
  v.normalize();
  double est = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    Vector w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = std::sqrt(nw);
    v = w / nw;
    const bool done = std::abs(next - est) <= tol * next;
    est = next;
    if (done) break;
  }
  return std::max(est, (a * v).norm());
}

namespace {
constexpr double kStepProduct = 0.95;
}  // namespace

RecoveryResult solve(const Matrix& a, const Vector& y, double eps, const Norm& penalty,
                     const SolveOptions& opts) {
  require(y.size() == a.rows(), ErrorCode::InvalidArgument, "y length must equal the row count");
  require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "eps must be >= 0");
  require(opts.max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be positive");
  require(opts.tol_relative_change > 0.0 && opts.step_ratio > 0.0, ErrorCode::InvalidArgument,
          "tolerances and step parameters must be positive");
  if (auto n = penalty.dim())
    require(static_cast<Eigen::Index>(*n) == a.cols(), ErrorCode::InvalidArgument,
            "penalty dimension does not match the matrix");
  require(penalty.kind() != NormKind::TreeStructured, ErrorCode::UnsupportedNorm,
          "tree-structured penalties have no prox");

  RecoveryResult res;
  const double tol_feas = opts.tol_feasibility.value_or(1e-9 * (1.0 + y.norm()));
  require(tol_feas > 0.0, ErrorCode::InvalidArgument, "feasibility tolerance must be positive");

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  res.rank_deficient = qr.rank() < std::min(a.rows(), a.cols());

  res.op_norm = operator_norm(a, opts.power_iters, opts.power_tol, opts.seed);
  if (res.op_norm == 0.0) {
    // A = 0: every z is feasible iff ||y|| <= eps, and z = 0 minimises.
    res.x_hat = Vector::Zero(a.cols());
    res.feasibility_residual = std::max(0.0, y.norm() - eps);
    res.converged = res.feasibility_residual <= tol_feas;
    return res;
  }
  // Power iteration approaches ||A|| from below; the 0.95 margin keeps
  // sigma tau ||A||^2 <= 1 despite a slightly low estimate.
  const double tau = std::sqrt(kStepProduct) * opts.step_ratio / res.op_norm;
  const double sigma = std::sqrt(kStepProduct) / (opts.step_ratio * res.op_norm);

  Vector z = Vector::Zero(a.cols());
  Vector zbar = z;
  Vector p = Vector::Zero(a.rows());
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const Vector q = p + sigma * (a * zbar);
    const Vector p_next = q - sigma * project_ball(q / sigma, y, eps);
    const Vector z_next = penalty.prox(z - tau * (a.transpose() * p_next), tau);
    const double change = (z_next - z).norm();
    const double scale = std::max(z_next.norm(), std::numeric_limits<double>::min());
    zbar = 2.0 * z_next - z;
    z = z_next;
    p = p_next;
    res.iterations = it;
    res.relative_change = change / scale;
    if (res.relative_change <= opts.tol_relative_change) {
      const double feas = std::max(0.0, (y - a * z).norm() - eps);
      if (feas <= tol_feas) {
        res.converged = true;
        break;
      }
    }
  }
  res.primal_step = tau;
  res.dual_step = sigma;
  res.x_hat = z;
  res.feasibility_residual = std::max(0.0, (y - a * z).norm() - eps);
  res.objective = penalty(z);
  res.converged = res.converged && res.feasibility_residual <= tol_feas;
  return res;
}

std::string recovery_result_json(const RecoveryResult& r, const SolveOptions& opts, int indent) {
  using nlohmann::json;
  json j;
  j["x_hat"] = std::vector<double>(r.x_hat.data(), r.x_hat.data() + r.x_hat.size());
  j["iterations"] = r.iterations;
  j["feasibility_residual"] = r.feasibility_residual;
  j["objective"] = r.objective;
  j["converged"] = r.converged;
  j["rank_deficient"] = r.rank_deficient;
  j["op_norm"] = r.op_norm;
  j["primal_step"] = r.primal_step;
  j["dual_step"] = r.dual_step;
  j["relative_change"] = r.relative_change;
  json o;
  o["max_iters"] = opts.max_iters;
  o["tol_feasibility"] = opts.tol_feasibility ? json(*opts.tol_feasibility) : json("auto");
  o["tol_relative_change"] = opts.tol_relative_change;
  o["step_ratio"] = opts.step_ratio;
  o["power_iters"] = opts.power_iters;
  o["power_tol"] = opts.power_tol;
  o["seed"] = opts.seed;
  j["options"] = o;
  return j.dump(indent);
}

}  // namespace cskit
