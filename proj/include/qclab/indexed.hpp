#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qclab {

/// Dense array addressed by a signed index range [first, last].
///
/// Chains and meshes are indexed symmetrically about the origin (atoms -M..M+1,
/// repatoms -N..N+1, elements -N..N), so every per-site field is stored with its
/// natural index rather than a shifted one.
class IndexedVector {
 public:
  IndexedVector() = default;
  IndexedVector(int first, int last, double fill = 0.0)
      : first_(first), data_(last >= first ? static_cast<std::size_t>(last - first + 1) : 0, fill) {}
  IndexedVector(int first, std::vector<double> values) : first_(first), data_(std::move(values)) {}

  int first() const { return first_; }
  int last() const { return first_ + static_cast<int>(data_.size()) - 1; }
  std::size_t size() const { return data_.size(); }
  bool contains(int i) const { return i >= first() && i <= last(); }

  double& operator()(int i) { return data_[static_cast<std::size_t>(i - first_)]; }
  double operator()(int i) const { return data_[static_cast<std::size_t>(i - first_)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& vector() const { return data_; }

  bool operator==(const IndexedVector&) const = default;

 private:
  int first_ = 0;
  std::vector<double> data_;
};

double max_abs(const IndexedVector& v);
/// Max-norm distance; both arguments must share the same index range.
double max_abs_diff(const IndexedVector& a, const IndexedVector& b);

}  // namespace qclab
