#pragma once

#include <functional>

namespace qclab {

struct RootOptions {
  double residual_tol = 1e-12;
  int max_iters = 200;
};

/// Bracketed root of f on [lo, hi]: bisection safeguarding Newton steps.
///
/// f(lo) and f(hi) must differ in sign (or one of them vanish); throws
/// BracketError otherwise. Returns once |f| <= residual_tol or the bracket
/// collapses to adjacent doubles.
double find_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                 double lo, double hi, RootOptions opts = {});

/// Largest x in [lo, hi] with g(x) <= 0, for g increasing and g(lo) <= 0.
///
/// Pure bisection down to adjacent doubles; the returned point always satisfies
/// g(x) <= 0 exactly as evaluated.
double last_feasible(const std::function<double(double)>& g, double lo, double hi);

}  // namespace qclab
