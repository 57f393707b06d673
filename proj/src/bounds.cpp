#include "cskit/bounds.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "cskit/decomposition.hpp"
#include "cskit/error.hpp"

namespace cskit {

ClassicalConstants thm41_constants(double delta_2k) {
  require(std::isfinite(delta_2k) && delta_2k >= 0.0, ErrorCode::InvalidArgument,
          "delta_2k must be a non-negative real");
  require(delta_2k < std::numbers::sqrt2 - 1.0, ErrorCode::NotCompressible,
          "delta_2k must be below sqrt(2) - 1");
  const double alpha = std::numbers::sqrt2 * delta_2k / (1.0 - delta_2k);
  require(alpha < 1.0, ErrorCode::NotCompressible, "alpha rounds to 1 or above");
  const double c0 = 2.0 * (1.0 + alpha) / (1.0 - alpha);
  const double c2 = 4.0 * std::sqrt(1.0 + delta_2k) / ((1.0 - delta_2k) * (1.0 - alpha));
  return {alpha, c0, c2};
}

namespace {

void copy_inputs(BoundReport& r, const NormPairConstants& k, const GripCertificate& cert_k,
                 const GripCertificate& cert_2k) {
  require(cert_2k.order == 2 * cert_k.order, ErrorCode::InvalidArgument,
          "certificates must have orders k and 2k");
  require(cert_k.partition_hash == cert_2k.partition_hash, ErrorCode::InvalidArgument,
          "certificates refer to different partitions");
  r.a = k.a;
  r.b = k.b;
  r.c = k.c;
  r.d = k.d;
  r.gamma = k.gamma;
  r.f = k.f;
  r.delta_2k = cert_2k.delta;
  r.rho_low_k = cert_k.rho_low;
  r.rho_high_k = cert_k.rho_high;
  r.rho_low_2k = cert_2k.rho_low;
  r.rho_high_2k = cert_2k.rho_high;
}

}  // namespace

void thm51_bound(BoundReport& r, const NormPairConstants& consts, const GripCertificate& cert_k,
                 const GripCertificate& cert_2k) {
  copy_inputs(r, consts, cert_k, cert_2k);
  const double a = consts.a, b = consts.b, c = consts.c, d = consts.d, g = consts.gamma;
  r.r1 = b / (a * g);
  r.r3 = b * (g + 1.0) / (a * g);
  r.coeff_sigma_A_51.reset();
  r.coeff_eps_51.reset();
  r.coeff_sigma_euclid_51.reset();
  r.coeff_eps_euclid_51.reset();
  if (!(cert_k.rho_low > 0.0)) {
    r.r2 = std::numeric_limits<double>::infinity();
    r.r4 = std::numeric_limits<double>::infinity();
    r.compressible_51 = false;
    return;
  }
  r.r2 = r.delta_2k * d / (c * cert_k.rho_low);
  r.r4 = 2.0 * d * std::sqrt(cert_k.rho_high) / cert_k.rho_low;
  const double det = 1.0 - r.r1 * r.r2;
  r.compressible_51 = det > 0.0;
  if (!r.compressible_51) return;
  r.coeff_sigma_A_51 = r.r3 * (r.r2 + 1.0) / det;
  r.coeff_eps_51 = r.r4 * (r.r1 + 1.0) / det;
  r.coeff_sigma_euclid_51 = *r.coeff_sigma_A_51 / a;
  r.coeff_eps_euclid_51 = *r.coeff_eps_51 / a;
}

void thm52_bound(BoundReport& r, const NormPairConstants& consts, const GripCertificate& cert_2k,
                 const GripCertificate& cert_k) {
  require(consts.f.has_value() && *consts.f > 0.0, ErrorCode::InvalidArgument,
          "the order-2k bound needs a positive constant f");
  copy_inputs(r, consts, cert_k, cert_2k);
  const double a = consts.a, b = consts.b, d = consts.d, gm = consts.gamma, f = *consts.f;
  r.r1 = b / (a * gm);
  r.r3 = b * (gm + 1.0) / (a * gm);
  r.coeff_sigma_52.reset();
  r.coeff_eps_52.reset();
  r.coeff_eps_52_order2k.reset();
  r.r5.reset();
  r.r5_order2k.reset();
  r.g_const.reset();
  r.w.reset();
  r.compressible_52 = false;
  if (!(cert_2k.rho_low > 0.0) || !(cert_k.rho_low > 0.0)) return;
  r.g_const = std::numbers::sqrt2 * r.delta_2k / (f * cert_2k.rho_low);
  r.w = r.r1 * d * *r.g_const;
  r.r5 = 2.0 * std::sqrt(cert_k.rho_high) / cert_k.rho_low;
  r.r5_order2k = 2.0 * std::sqrt(cert_2k.rho_high) / cert_2k.rho_low;
  r.compressible_52 = *r.w < 1.0;
  if (!r.compressible_52) return;
  const double det = 1.0 - *r.w;
  r.coeff_sigma_52 = r.r3 * (*r.g_const + 1.0 / f) / det;
  r.coeff_eps_52 = *r.r5 * (1.0 + r.r1 * d / f) / det;
  r.coeff_eps_52_order2k = *r.r5_order2k * (1.0 + r.r1 * d / f) / det;
}

BoundReport evaluate_bounds(const NormPairConstants& consts, const GripCertificate& cert_k,
                            const GripCertificate& cert_2k) {
  BoundReport r;
  thm51_bound(r, consts, cert_k, cert_2k);
  if (consts.f) thm52_bound(r, consts, cert_2k, cert_k);
  if (r.delta_2k >= 0.0 && r.delta_2k < std::numbers::sqrt2 - 1.0) {
    const auto cc = thm41_constants(r.delta_2k);
    r.alpha = cc.alpha;
    r.C0 = cc.c0;
    r.C2 = cc.c2;
  }
  return r;
}

RecoveryCheck verify_recovery_bound(const Vector& x_true, const Vector& x_hat, double sigma_A,
                                    double eps, const BoundReport& report) {
  require(x_true.size() == x_hat.size(), ErrorCode::InvalidArgument, "vector lengths differ");
  RecoveryCheck out;
  out.error = (x_hat - x_true).norm();
  if (report.compressible_51) {
    out.bound_51 = *report.coeff_sigma_euclid_51 * sigma_A + *report.coeff_eps_euclid_51 * eps;
    out.slack_51 = *out.bound_51 - out.error;
    out.holds_51 = *out.slack_51 >= 0.0;
  }
  if (report.compressible_52) {
    out.bound_52 = *report.coeff_sigma_52 * sigma_A + *report.coeff_eps_52 * eps;
    out.slack_52 = *out.bound_52 - out.error;
    out.holds_52 = *out.slack_52 >= 0.0;
  }
  return out;
}

std::string bound_report_json(const BoundReport& r, int indent) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["a"] = num(r.a);
  j["b"] = num(r.b);
  j["c"] = num(r.c);
  j["d"] = num(r.d);
  j["gamma"] = num(r.gamma);
  j["f"] = opt(r.f);
  j["delta_2k"] = num(r.delta_2k);
  j["rho_low_k"] = num(r.rho_low_k);
  j["rho_high_k"] = num(r.rho_high_k);
  j["rho_low_2k"] = num(r.rho_low_2k);
  j["rho_high_2k"] = num(r.rho_high_2k);
  j["r1"] = num(r.r1);
  j["r2"] = num(r.r2);
  j["r3"] = num(r.r3);
  j["r4"] = num(r.r4);
  j["r5"] = opt(r.r5);
  j["r5_order2k"] = opt(r.r5_order2k);
  j["g_const"] = opt(r.g_const);
  j["w"] = opt(r.w);
  j["alpha"] = opt(r.alpha);
  j["C0"] = opt(r.C0);
  j["C2"] = opt(r.C2);
  j["compressible_51"] = r.compressible_51;
  j["compressible_52"] = r.compressible_52;
  j["coeff_sigma_A_51"] = opt(r.coeff_sigma_A_51);
  j["coeff_eps_51"] = opt(r.coeff_eps_51);
  j["coeff_sigma_euclid_51"] = opt(r.coeff_sigma_euclid_51);
  j["coeff_eps_euclid_51"] = opt(r.coeff_eps_euclid_51);
  j["coeff_sigma_52"] = opt(r.coeff_sigma_52);
  j["coeff_eps_52"] = opt(r.coeff_eps_52);
  j["coeff_eps_52_order2k"] = opt(r.coeff_eps_52_order2k);
  return j.dump(indent);
}

// ------------------------------------------------------------------ lemmas

std::vector<DecompositionPiece> decompose_complement(const Vector& h, const GksMember& lambda0,
                                                     const Norm& approx,
                                                     const GksFamily& family) {
  return optimal_decomposition(restrict_to_complement(h, lambda0.set), approx, family,
                               lambda0.group_ids);
}

InequalityCheck lemma_piece_sum(const Vector& h, const GksMember& lambda0, const Norm& approx,
                                const GksFamily& family, double c) {
  InequalityCheck out;
  for (const auto& p : decompose_complement(h, lambda0, approx, family)) out.lhs += p.component.norm();
  out.rhs = approx(restrict_to_complement(h, lambda0.set)) / c;
  return out;
}

InequalityCheck lemma_tail_sum(const Vector& h, const GksMember& lambda0, const Norm& approx,
                               const GksFamily& family, double f) {
  InequalityCheck out;
  const auto pieces = decompose_complement(h, lambda0, approx, family);
  for (std::size_t j = 1; j < pieces.size(); ++j) out.lhs += pieces[j].component.norm();
  out.rhs = approx(restrict_to_complement(h, lambda0.set)) / f;
  return out;
}

InequalityCheck lemma_head_bound(const Matrix& a, const Vector& h, const GksMember& lambda0,
                                 const Norm& approx, double c, const GripCertificate& cert_k,
                                 const GripCertificate& cert_2k) {
  InequalityCheck out;
  out.lhs = restrict_to(h, lambda0.set).norm();
  out.rhs = cert_2k.delta / (c * cert_k.rho_low) * approx(restrict_to_complement(h, lambda0.set)) +
            std::sqrt(cert_k.rho_high) / cert_k.rho_low * (a * h).norm();
  return out;
}

InequalityCheck lemma_pair_head_bound(const Matrix& a, const Vector& h, const GksMember& lambda0,
                                      const Norm& approx, const GksFamily& family, double f,
                                      const GripCertificate& cert_2k) {
  const auto pieces = decompose_complement(h, lambda0, approx, family);
  Support both = lambda0.set;
  if (!pieces.empty()) both = both.united(pieces.front().set);
  InequalityCheck out;
  out.lhs = restrict_to(h, both).norm();
  out.rhs = std::numbers::sqrt2 * cert_2k.delta / (f * cert_2k.rho_low) *
                approx(restrict_to_complement(h, lambda0.set)) +
            std::sqrt(cert_2k.rho_high) / cert_2k.rho_low * (a * h).norm();
  return out;
}

}  // namespace cskit
