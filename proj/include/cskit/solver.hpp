#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cskit/groups.hpp"
#include "cskit/norms.hpp"

namespace cskit {

struct SolveOptions {
  std::size_t max_iters = 100'000;
  /// Absolute tolerance on max(0, ||y - Az||_2 - eps); nullopt means
  /// 1e-9 (1 + ||y||_2).
  std::optional<double> tol_feasibility;
  double tol_relative_change = 1e-10;
  /// Primal step tau = s step_ratio / ||A||, dual step sigma = s / (step_ratio ||A||)
  /// with s^2 = 0.95, so sigma tau ||A||^2 = 0.95. Small ratios favour the
  /// dual side, which converges much faster when eps > 0.
  double step_ratio = 0.003;
  std::size_t power_iters = 50;
  double power_tol = 1e-10;
  /// Seeds the power-iteration start vector.
  std::uint64_t seed = 0;
};

struct RecoveryResult {
  Vector x_hat;
  std::size_t iterations = 0;
  double feasibility_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  bool rank_deficient = false;
  double op_norm = 0.0;
  double primal_step = 0.0;
  double dual_step = 0.0;
  double relative_change = 0.0;
};

/// `v` if it lies within `radius` of `center`, else its radial projection
/// onto that sphere.
Vector project_ball(const Vector& v, const Vector& center, double radius);

/// Largest singular value of `a` by power iteration on A^T A.
double operator_norm(const Matrix& a, std::size_t iters, double tol, std::uint64_t seed);

/// argmin ||z||_P subject to ||y - Az||_2 <= eps by primal-dual splitting:
///   p <- p + sigma A zbar - sigma proj_ball((p + sigma A zbar)/sigma; y, eps)
///   z' <- prox_{tau P}(z - tau A^T p),  zbar <- 2 z' - z.
/// Running out of iterations returns converged = false rather than throwing.
RecoveryResult solve(const Matrix& a, const Vector& y, double eps, const Norm& penalty,
                     const SolveOptions& opts = {});

/// Flat JSON object with the result fields and the options used.
std::string recovery_result_json(const RecoveryResult& r, const SolveOptions& opts, int indent = 2);

}  // namespace cskit
