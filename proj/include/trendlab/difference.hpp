#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trendlab {

/// k-th order difference operator D (k in {1, 2}), an (N - k) x N matrix.
/// Row j of D touches m_j..m_{j+k} (0-based). In 1-based time, row j is the
/// slope change at vertex t = j + k, i.e. it pairs with the dual value z_t.
///   k = 1: (D m)_j = m_{j+1} - m_j
///   k = 2: (D m)_j = m_j - 2 m_{j+1} + m_{j+2}
std::vector<double> difference(int order, std::span<const double> m);

/// D^T z for a difference vector of length N - k.
std::vector<double> difference_transpose(int order, std::span<const double> z);

/// Adds rho * D^T D to the band of an (N x N) matrix with bandwidth >= order.
class BandedSpd;
void add_gram(int order, double rho, BandedSpd& a);

/// Vertex location (1-based) of difference row j.
inline std::size_t vertex_of_row(int order, std::size_t j) noexcept {
  return j + static_cast<std::size_t>(order);
}

void require_order(int order);

}  // namespace trendlab
