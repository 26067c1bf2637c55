#include "trendlab/difference.hpp"

#include <stdexcept>
#include <string>

#include "trendlab/banded.hpp"

namespace trendlab {

void require_order(int order) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("difference order must be 1 or 2, got " + std::to_string(order));
  }
}

std::vector<double> difference(int order, std::span<const double> m) {
  require_order(order);
  const std::size_t k = static_cast<std::size_t>(order);
  if (m.size() <= k) return {};
  std::vector<double> w(m.size() - k);
  if (order == 1) {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = m[j + 1] - m[j];
  } else {
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = m[j] - 2.0 * m[j + 1] + m[j + 2];
  }
  return w;
}

std::vector<double> difference_transpose(int order, std::span<const double> z) {
  require_order(order);
  const std::size_t k = static_cast<std::size_t>(order);
  std::vector<double> out(z.size() + k, 0.0);
  if (order == 1) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      out[j] -= z[j];
      out[j + 1] += z[j];
    }
  } else {
    for (std::size_t j = 0; j < z.size(); ++j) {
      out[j] += z[j];
      out[j + 1] -= 2.0 * z[j];
      out[j + 2] += z[j];
    }
  }
  return out;
}

void add_gram(int order, double rho, BandedSpd& a) {
  require_order(order);
  const std::size_t n = a.size();
  const std::size_t k = static_cast<std::size_t>(order);
  if (a.bandwidth() < k) throw std::invalid_argument("band too narrow for difference Gram");
  if (n <= k) return;
  // each row of D contributes rho * d d^T over its k + 1 support
  static constexpr double kStencil1[] = {-1.0, 1.0};
  static constexpr double kStencil2[] = {1.0, -2.0, 1.0};
  const double* stencil = order == 1 ? kStencil1 : kStencil2;
  for (std::size_t j = 0; j + k < n; ++j) {
    for (std::size_t p = 0; p <= k; ++p) {
      for (std::size_t q = 0; q <= p; ++q) {
        a.at(j + p, j + q) += rho * stencil[p] * stencil[q];
      }
    }
  }
}

}  // namespace trendlab
