#include "qclab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qclab/banded.hpp"
#include "qclab/errors.hpp"

namespace qclab {

AtomChain AtomChain::uniform(int M, double spacing) {
  AtomChain c;
  c.M = M;
  c.y = IndexedVector(-M, M + 1);
  for (int i = -M; i <= M + 1; ++i) c.y(i) = i * spacing;
  c.dead_loads = IndexedVector(-M, M);
  return c;
}

IndexedVector tension_load(int M, double Phi) {
  IndexedVector f(-M, M);
  f(-M) = -Phi;
  return f;
}

namespace {

void require_ordered(const IndexedVector& y) {
  for (int i = y.first(); i < y.last(); ++i) {
    if (!(y(i + 1) > y(i))) {
      std::ostringstream msg;
      msg << "chain is not ordered at atom " << i << ": y=" << y(i) << ", next=" << y(i + 1);
      throw DomainError(msg.str());
    }
  }
}

double external_energy(const AtomChain& c, const IndexedVector& y) {
  double e = 0.0;
  for (int i = -c.M; i <= c.M; ++i) e -= c.dead_loads(i) * y(i);
  return e;
}

}  // namespace

double atomistic_energy(const PairPotential& p, const IndexedVector& y) {
  require_ordered(y);
  double e = 0.0;
  for (int i = y.first(); i < y.last(); ++i) e += p(y(i + 1) - y(i), 0);
  for (int i = y.first(); i + 2 <= y.last(); ++i) e += p(y(i + 2) - y(i), 0);
  return e;
}

IndexedVector atomistic_forces(const PairPotential& p, const IndexedVector& y) {
  require_ordered(y);
  IndexedVector f(y.first(), y.last() - 1);
  for (int i = y.first(); i < y.last(); ++i) {
    // bond (i, i+1) and (i, i+2): pulls i forward, i+k backward
    const double d1 = p(y(i + 1) - y(i), 1);
    f(i) += d1;
    if (f.contains(i + 1)) f(i + 1) -= d1;
    if (i + 2 <= y.last()) {
      const double d2 = p(y(i + 2) - y(i), 1);
      f(i) += d2;
      if (f.contains(i + 2)) f(i + 2) -= d2;
    }
  }
  return f;
}

double atomistic_energy(const PairPotential& p, const AtomChain& c) { return atomistic_energy(p, c.y); }

IndexedVector atomistic_forces(const PairPotential& p, const AtomChain& c) { return atomistic_forces(p, c.y); }

AtomChain atomistic_solve(const PairPotential& p, const AtomChain& start, AtomisticSolveOptions opts) {
  require_ordered(start.y);
  AtomChain c = start;
  const int M = c.M;
  const std::size_t n = static_cast<std::size_t>(2 * M + 1);  // free atoms -M..M
  auto slot = [M](int i) { return static_cast<std::size_t>(i + M); };

  auto residual = [&](const IndexedVector& y) {
    IndexedVector r = atomistic_forces(p, y);
    for (int i = -M; i <= M; ++i) r(i) += c.dead_loads(i);
    return r;
  };
  auto total_energy = [&](const IndexedVector& y) { return atomistic_energy(p, y) + external_energy(c, y); };
  auto fail = [&](const std::string& why) -> NonConvergence {
    return NonConvergence("atomistic solve: " + why, c.y.vector());
  };

  for (int it = 0; it <= opts.max_iters; ++it) {
    const IndexedVector res = residual(c.y);
    if (max_abs(res) <= opts.tol) return c;
    if (it == opts.max_iters) break;

    // Hessian of the total energy restricted to free atoms; bonds are at most two apart.
    SymmetricBanded hess(n, 2);
    for (int i = -M; i <= M + 1; ++i) {
      for (int k = 1; k <= 2 && i + k <= M + 1; ++k) {
        const double h = p(c.y(i + k) - c.y(i), 2);
        const bool free_i = i <= M;
        const bool free_j = i + k <= M;
        if (free_i) hess.at(slot(i), slot(i)) += h;
        if (free_j) hess.at(slot(i + k), slot(i + k)) += h;
        if (free_i && free_j) hess.at(slot(i), slot(i + k)) -= h;
      }
    }

    BandedLdlt ldlt;
    double shift = 0.0;
    while (!ldlt.factor(hess)) {
      const double bump = shift == 0.0 ? std::max(1e-8, 1e-4 * hess.max_abs_diagonal()) : 9.0 * shift;
      hess.add_to_diagonal(bump);
      shift += bump;
      if (!std::isfinite(shift)) throw fail("Hessian could not be regularized");
    }
    std::vector<double> step(n);
    for (int i = -M; i <= M; ++i) step[slot(i)] = res(i);  // -grad
    ldlt.solve(step);

    const double e0 = total_energy(c.y);
    double slope = 0.0;
    for (int i = -M; i <= M; ++i) slope -= res(i) * step[slot(i)];

    double t = 1.0;
    IndexedVector trial = c.y;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (int i = -M; i <= M; ++i) trial(i) = c.y(i) + t * step[slot(i)];
      bool ordered = true;
      for (int i = -M; i <= M; ++i) ordered = ordered && trial(i + 1) > trial(i);
      if (!ordered) continue;
      const double e1 = total_energy(trial);
      // Near convergence energy differences drown in rounding; fall back to the residual.
      if (e1 <= e0 + 1e-4 * t * slope || (shift == 0.0 && max_abs(residual(trial)) < max_abs(res))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw fail("line search failed");
    c.y = trial;
    for (int i = -M; i <= M; ++i) {
      if (c.y(i + 1) - c.y(i) > opts.max_bond) throw fail("chain separated");
    }
  }
  throw fail("iteration budget exhausted");
}

}  // namespace qclab
