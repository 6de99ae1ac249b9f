#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qclab {

/// Symmetric banded matrix stored by diagonals: band(k)[i] = A(i, i+k).
class SymmetricBanded {
 public:
  SymmetricBanded(std::size_t n, std::size_t half_bandwidth);

  std::size_t size() const { return n_; }
  std::size_t half_bandwidth() const { return p_; }

  /// Entry (i, j) with |i - j| <= half_bandwidth; symmetric access.
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  void add_to_diagonal(double shift);
  double max_abs_diagonal() const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<std::vector<double>> bands_;
};

/// LDL^T factorization of a symmetric banded matrix without pivoting.
///
/// factor() returns false when a nonpositive pivot appears, i.e. the matrix is
/// not positive definite; solve() is only valid after a successful factor().
class BandedLdlt {
 public:
  bool factor(const SymmetricBanded& a);
  void solve(std::span<double> rhs) const;

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> d_;
  std::vector<std::vector<double>> l_;  // l_[k][i] = L(i+k, i)
};

}  // namespace qclab
