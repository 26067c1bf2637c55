#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace trendlab {

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric positive-definite band matrix with `bandwidth` sub-diagonals,
/// factorized in place as L L^T. Storage is the lower band, row-major:
/// entry (i, j) with i - bandwidth <= j <= i lives at i * (bandwidth + 1) +
/// (j - i + bandwidth).
class BandedSpd {
 public:
  BandedSpd(std::size_t n, std::size_t bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return p_; }

  /// Lower-triangle access, requires j <= i && i - j <= bandwidth.
  double& at(std::size_t i, std::size_t j) noexcept { return band_[i * (p_ + 1) + (j + p_ - i)]; }
  double at(std::size_t i, std::size_t j) const noexcept {
    return band_[i * (p_ + 1) + (j + p_ - i)];
  }

  /// Cholesky factorization; throws NotPositiveDefinite on a non-positive pivot.
  void factorize();
  bool factorized() const noexcept { return factorized_; }

  /// Solves A x = b in place (requires factorize()).
  void solve(std::span<double> b) const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> band_;
  bool factorized_ = false;
};

}  // namespace trendlab
