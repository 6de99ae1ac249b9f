#include "qclab/indexed.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace qclab {

double max_abs(const IndexedVector& v) {
  double m = 0.0;
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const IndexedVector& a, const IndexedVector& b) {
  assert(a.first() == b.first() && a.size() == b.size());
  double m = 0.0;
  for (int i = a.first(); i <= a.last(); ++i) m = std::max(m, std::abs(a(i) - b(i)));
  return m;
}

}  // namespace qclab
