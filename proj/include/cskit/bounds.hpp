#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "cskit/decomposition.hpp"
#include "cskit/groups.hpp"
#include "cskit/norms.hpp"
#include "cskit/sensing.hpp"

namespace cskit {

/// Constants of the classical RIP error bound for l1 minimisation.
struct ClassicalConstants {
  double alpha;
  double c0;
  double c2;
};

/// alpha = sqrt(2) delta / (1 - delta), C0 = 2 (1 + alpha) / (1 - alpha),
/// C2 = 4 sqrt(1 + delta) / ((1 - delta)(1 - alpha)). Throws not-compressible
/// unless 0 <= delta_2k < sqrt(2) - 1.
ClassicalConstants thm41_constants(double delta_2k);

/// Every constant and coefficient of the two group error bounds.
///
/// The first bound (support-order k condition) reads
///   ||xhat - x||_A <= coeff_sigma_A_51 sigma_A + coeff_eps_51 eps
/// and its Euclidean form divides both coefficients by a. The second bound
/// (order 2k, needs f) is Euclidean directly. Coefficients are only present
/// when the corresponding compressibility flag holds.
struct BoundReport {
  // inputs
  double a = 0, b = 0, c = 0, d = 0, gamma = 1;
  std::optional<double> f;
  double delta_2k = 0, rho_low_k = 0, rho_high_k = 0, rho_low_2k = 0, rho_high_2k = 0;

  // first bound
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
  bool compressible_51 = false;
  std::optional<double> coeff_sigma_A_51, coeff_eps_51;
  std::optional<double> coeff_sigma_euclid_51, coeff_eps_euclid_51;

  // second bound
  std::optional<double> r5, g_const, w;
  /// r5 computed from the order-2k constants instead of order k.
  std::optional<double> r5_order2k;
  bool compressible_52 = false;
  std::optional<double> coeff_sigma_52, coeff_eps_52;
  std::optional<double> coeff_eps_52_order2k;

  // classical constants when delta_2k < sqrt(2) - 1
  std::optional<double> alpha, C0, C2;
};

/// Fills the first-bound fields: r1 = b/(a gamma), r2 = delta_2k d/(c rho_k),
/// r3 = b (gamma + 1)/(a gamma), r4 = 2 d sqrt(rhobar_k)/rho_k, compressible
/// iff r1 r2 < 1 and rho_k > 0.
void thm51_bound(BoundReport& report, const NormPairConstants& consts,
                 const GripCertificate& cert_k, const GripCertificate& cert_2k);

/// Fills the second-bound fields: g = sqrt(2) delta_2k/(f rho_2k), w = r1 d g,
/// r5 = 2 sqrt(rhobar_k)/rho_k, compressible iff w < 1. Requires f.
void thm52_bound(BoundReport& report, const NormPairConstants& consts,
                 const GripCertificate& cert_2k, const GripCertificate& cert_k);

/// Both bounds plus the classical constants where they exist.
BoundReport evaluate_bounds(const NormPairConstants& consts, const GripCertificate& cert_k,
                            const GripCertificate& cert_2k);

struct RecoveryCheck {
  double error = 0.0;  // ||xhat - x||_2
  std::optional<bool> holds_51, holds_52;
  std::optional<double> bound_51, bound_52;
  std::optional<double> slack_51, slack_52;  // bound minus error
};

/// Compares ||xhat - x||_2 with the Euclidean bound of each compressible
/// theorem in `report`.
RecoveryCheck verify_recovery_bound(const Vector& x_true, const Vector& x_hat, double sigma_A,
                                    double eps, const BoundReport& report);

/// Flat JSON object with every field; absent optionals are null.
std::string bound_report_json(const BoundReport& report, int indent = 2);

// ------------------------------------------------------- lemma inequalities

/// Left and right sides of one inequality instance.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double tol = 1e-12) const { return lhs <= rhs + tol * std::max(1.0, rhs); }
};

/// Optimal decomposition of h restricted to the complement of `lambda0`,
/// with the groups of `lambda0` excluded.
std::vector<DecompositionPiece> decompose_complement(const Vector& h, const GksMember& lambda0,
                                                     const Norm& approx,
                                                     const GksFamily& family);

/// sum_{j>=1} ||h_j||_2 <= (1/c) ||h_{L0^c}||_A.
InequalityCheck lemma_piece_sum(const Vector& h, const GksMember& lambda0, const Norm& approx,
                                const GksFamily& family, double c);

/// sum_{j>=2} ||h_j||_2 <= (1/f) ||h_{L0^c}||_A.
InequalityCheck lemma_tail_sum(const Vector& h, const GksMember& lambda0, const Norm& approx,
                               const GksFamily& family, double f);

/// ||h_{L0}||_2 <= delta_2k/(c rho_k) ||h_{L0^c}||_A + sqrt(rhobar_k)/rho_k ||Ah||_2.
InequalityCheck lemma_head_bound(const Matrix& a, const Vector& h, const GksMember& lambda0,
                                 const Norm& approx, double c, const GripCertificate& cert_k,
                                 const GripCertificate& cert_2k);

/// With L = L0 u L1: ||h_L||_2 <= sqrt(2) delta_2k/(f rho_2k) ||h_{L0^c}||_A
/// + sqrt(rhobar_2k)/rho_2k ||Ah||_2.
InequalityCheck lemma_pair_head_bound(const Matrix& a, const Vector& h, const GksMember& lambda0,
                                      const Norm& approx, const GksFamily& family, double f,
                                      const GripCertificate& cert_2k);

}  // namespace cskit
