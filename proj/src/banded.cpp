#include "trendlab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trendlab {

BandedSpd::BandedSpd(std::size_t n, std::size_t bandwidth)
    : n_(n), p_(bandwidth), band_(n * (bandwidth + 1), 0.0) {}

void BandedSpd::factorize() {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > p_ ? i - p_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      double sum = at(i, j);
      const std::size_t k0 = std::max(j0, j > p_ ? j - p_ : std::size_t{0});
      for (std::size_t k = k0; k < j; ++k) sum -= at(i, k) * at(j, k);
      if (j == i) {
        if (!(sum > 0.0)) {
          throw NotPositiveDefinite("non-positive pivot at row " + std::to_string(i));
        }
        at(i, i) = std::sqrt(sum);
      } else {
        at(i, j) = sum / at(j, j);
      }
    }
  }
  factorized_ = true;
}

void BandedSpd::solve(std::span<double> b) const {
  // forward: L x = b
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = b[i];
    const std::size_t j0 = i > p_ ? i - p_ : 0;
    for (std::size_t j = j0; j < i; ++j) sum -= at(i, j) * b[j];
    b[i] = sum / at(i, i);
  }
  // backward: L^T x = y
  for (std::size_t ii = n_; ii-- > 0;) {
    double sum = b[ii];
    const std::size_t j1 = std::min(n_ - 1, ii + p_);
    for (std::size_t j = ii + 1; j <= j1; ++j) sum -= at(j, ii) * b[j];
    b[ii] = sum / at(ii, ii);
  }
}

}  // namespace trendlab
