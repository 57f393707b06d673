#include "cskit/decomposition.hpp"

#include <limits>

#include "cskit/error.hpp"

namespace cskit {

namespace {

void check_length(const Vector& x, const GksFamily& family) {
  require(static_cast<std::size_t>(x.size()) == family.n(), ErrorCode::InvalidArgument,
          "vector length does not match partition dimension");
}

bool touches(const GksMember& m, const std::vector<bool>& used) {
  for (std::size_t g : m.group_ids)
    if (used[g]) return true;
  return false;
}

// Members are sorted lexicographically, so keeping the first strict minimum
// implements the tie-break rule.
BestApproximation search(const Vector& x, const Norm& norm, const GksFamily& family,
                         const std::vector<bool>& used) {
  BestApproximation best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (touches(family[j], used)) continue;
    const double v = norm(restrict_to_complement(x, family[j].set));
    if (v < best.value) {
      best.value = v;
      best.member = j;
    }
  }
  return best;
}

}  // namespace

BestApproximation best_approximation(const Vector& x, const Norm& norm, const GksFamily& family) {
  check_length(x, family);
  if (family.empty()) return BestApproximation{norm(x), BestApproximation::npos};
  return search(x, norm, family, std::vector<bool>(family.partition().num_groups(), false));
}

double sparsity_index(const Vector& x, const Norm& norm, const GksFamily& family) {
  return best_approximation(x, norm, family).value;
}

std::vector<DecompositionPiece> optimal_decomposition(const Vector& x, const Norm& norm,
                                                      const GksFamily& family,
                                                      std::span<const std::size_t> excluded_groups) {
  check_length(x, family);
  require(!family.empty(), ErrorCode::InvalidArgument, "decomposition needs a non-empty family");
  std::vector<bool> used(family.partition().num_groups(), false);
  for (std::size_t g : excluded_groups) {
    require(g < used.size(), ErrorCode::InvalidArgument, "excluded group out of range");
    used[g] = true;
  }

  std::vector<DecompositionPiece> pieces;
  Vector residual = x;
  while (!residual.isZero(0.0)) {
    const BestApproximation best = search(residual, norm, family, used);
    require(best.member != BestApproximation::npos, ErrorCode::DecompositionStalled,
            "no unused family member remains for a nonzero residual");
    const GksMember& m = family[best.member];
    Vector piece = restrict_to(residual, m.set);
    require(!piece.isZero(0.0), ErrorCode::DecompositionStalled,
            "residual support meets no usable family member");
    for (std::size_t g : m.group_ids) used[g] = true;
    residual = restrict_to_complement(residual, m.set);
    pieces.push_back({m.set, std::move(piece)});
  }
  return pieces;
}

}  // namespace cskit
