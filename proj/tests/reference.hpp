#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cskit/norms.hpp"

namespace cskit::reference {

// Quadratic-time sorted-l1 prox: pool adjacent violators by repeated scans
// until the block means are non-increasing, then clip at zero.
inline Vector prox_sorted_l1_reference(const Vector& v, const std::vector<double>& lambda, double t) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(v[static_cast<Eigen::Index>(a)]) > std::abs(v[static_cast<Eigen::Index>(b)]);
  });
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < n; ++i)
    blocks.push_back({std::abs(v[static_cast<Eigen::Index>(order[i])]) - t * lambda[i], 1});
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
      const double left = blocks[j].sum / static_cast<double>(blocks[j].count);
      const double right = blocks[j + 1].sum / static_cast<double>(blocks[j + 1].count);
      if (left <= right) {
        blocks[j].sum += blocks[j + 1].sum;
        blocks[j].count += blocks[j + 1].count;
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        merged = true;
        break;
      }
    }
  }
  Vector out(v.size());
  std::size_t pos = 0;
  for (const auto& b : blocks) {
    const double value = std::max(0.0, b.sum / static_cast<double>(b.count));
    for (std::size_t c = 0; c < b.count; ++c, ++pos) {
      const auto i = static_cast<Eigen::Index>(order[pos]);
      out[i] = v[i] < 0 ? -value : value;
      if (out[i] == 0.0) out[i] = 0.0;
    }
  }
  return out;
}

}  // namespace cskit::reference
