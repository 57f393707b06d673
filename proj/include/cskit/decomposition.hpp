#pragma once

#include <span>
#include <vector>

#include "cskit/groups.hpp"
#include "cskit/norms.hpp"

namespace cskit {

/// Result of the exhaustive minimisation of ||x - x_L|| over a family.
struct BestApproximation {
  double value = 0.0;
  /// Index into the family, or npos when the family is empty.
  std::size_t member = npos;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Group k-sparsity index: min over members L of ||x - x_L||, by exhaustive
/// search. Ties go to the member whose index list is lexicographically
/// smallest. An empty family yields ||x||.
BestApproximation best_approximation(const Vector& x, const Norm& norm, const GksFamily& family);

double sparsity_index(const Vector& x, const Norm& norm, const GksFamily& family);

struct DecompositionPiece {
  Support set;
  Vector component;  // x restricted to `set`
};

/// Greedy optimal group k-sparse decomposition: each piece minimises the norm
/// of what remains after removing it. Members touching `excluded_groups` are
/// never used, so decomposing h restricted to the complement of L0 with the
/// groups of L0 excluded yields pieces disjoint from L0. Throws
/// decomposition-stalled if a nonzero residual cannot be reduced.
std::vector<DecompositionPiece> optimal_decomposition(
    const Vector& x, const Norm& norm, const GksFamily& family,
    std::span<const std::size_t> excluded_groups = {});

}  // namespace cskit
