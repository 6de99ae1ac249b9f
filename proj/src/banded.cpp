#include "qclab/banded.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace qclab {

SymmetricBanded::SymmetricBanded(std::size_t n, std::size_t half_bandwidth)
    : n_(n), p_(half_bandwidth), bands_(half_bandwidth + 1) {
  for (std::size_t k = 0; k <= p_; ++k) bands_[k].assign(n_ > k ? n_ - k : 0, 0.0);
}

double& SymmetricBanded::at(std::size_t i, std::size_t j) {
  if (j < i) std::swap(i, j);
  assert(j - i <= p_);
  return bands_[j - i][i];
}

double SymmetricBanded::at(std::size_t i, std::size_t j) const {
  if (j < i) std::swap(i, j);
  if (j - i > p_) return 0.0;
  return bands_[j - i][i];
}

void SymmetricBanded::add_to_diagonal(double shift) {
  for (double& d : bands_[0]) d += shift;
}

double SymmetricBanded::max_abs_diagonal() const {
  double m = 0.0;
  for (double d : bands_[0]) m = std::max(m, std::abs(d));
  return m;
}

bool BandedLdlt::factor(const SymmetricBanded& a) {
  n_ = a.size();
  p_ = a.half_bandwidth();
  d_.assign(n_, 0.0);
  l_.assign(p_ + 1, {});
  for (std::size_t k = 1; k <= p_; ++k) l_[k].assign(n_ > k ? n_ - k : 0, 0.0);

  auto lower = [&](std::size_t i, std::size_t j) -> double {  // L(i, j), i >= j
    return i == j ? 1.0 : l_[i - j][j];
  };

  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t k0 = j > p_ ? j - p_ : 0;
    double dj = a.at(j, j);
    for (std::size_t k = k0; k < j; ++k) {
      const double ljk = lower(j, k);
      dj -= ljk * ljk * d_[k];
    }
    if (!(dj > 0.0) || !std::isfinite(dj)) return false;
    d_[j] = dj;
    const std::size_t imax = std::min(n_ - 1, j + p_);
    for (std::size_t i = j + 1; i <= imax; ++i) {
      double v = a.at(i, j);
      const std::size_t kk0 = i > p_ ? i - p_ : 0;
      for (std::size_t k = std::max(k0, kk0); k < j; ++k) v -= lower(i, k) * lower(j, k) * d_[k];
      l_[i - j][j] = v / dj;
    }
  }
  return true;
}

void BandedLdlt::solve(std::span<double> rhs) const {
  assert(rhs.size() == n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t k0 = i > p_ ? i - p_ : 0;
    for (std::size_t k = k0; k < i; ++k) rhs[i] -= l_[i - k][k] * rhs[k];
  }
  for (std::size_t i = 0; i < n_; ++i) rhs[i] /= d_[i];
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t kmax = std::min(n_ - 1, i + p_);
    for (std::size_t k = i + 1; k <= kmax; ++k) rhs[i] -= l_[k - i][i] * rhs[k];
  }
}

}  // namespace qclab
