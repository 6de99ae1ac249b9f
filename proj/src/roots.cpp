#include "qclab/roots.hpp"

#include <cmath>
#include <sstream>

#include "qclab/errors.hpp"

namespace qclab {

double find_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                 double lo, double hi, RootOptions opts) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << flo << ", f(hi)=" << fhi;
    throw BracketError(msg.str());
  }
  // Orient so that f(neg) < 0 < f(pos).
  double neg = flo < 0.0 ? lo : hi;
  double pos = flo < 0.0 ? hi : lo;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iters; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= opts.residual_tol) return x;
    (fx < 0.0 ? neg : pos) = x;

    const double a = std::min(neg, pos);
    const double b = std::max(neg, pos);
    if (std::nextafter(a, b) >= b) return std::abs(f(a)) < std::abs(f(b)) ? a : b;

    const double slope = df ? df(x) : 0.0;
    double next = slope != 0.0 ? x - fx / slope : a - 1.0;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  return x;
}

double last_feasible(const std::function<double(double)>& g, double lo, double hi) {
  if (g(hi) <= 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace qclab
