#pragma once

#include "qclab/indexed.hpp"
#include "qclab/potential.hpp"

namespace qclab {

/// Fully atomistic second-neighbor chain: atoms -M..M+1, the last one clamped.
struct AtomChain {
  int M = 0;
  IndexedVector y;           ///< positions, indices -M..M+1; y(M+1) is the imposed end
  IndexedVector dead_loads;  ///< external forces on atoms -M..M

  /// y_i = i * spacing with zero dead loads.
  static AtomChain uniform(int M, double spacing);

  double fixed_end() const { return y(M + 1); }
};

/// Dead loads modelling uniform tension: -Phi on atom -M, zero elsewhere.
IndexedVector tension_load(int M, double Phi);

/// Sum of nearest- and second-neighbor bond energies (dead loads excluded).
double atomistic_energy(const PairPotential& p, const AtomChain& c);

/// F_i = -dE/dy_i for i = -M..M; bonds reaching past either end contribute nothing.
IndexedVector atomistic_forces(const PairPotential& p, const AtomChain& c);

/// Sum of nearest- and second-neighbor bond energies for bare positions.
double atomistic_energy(const PairPotential& p, const IndexedVector& y);
IndexedVector atomistic_forces(const PairPotential& p, const IndexedVector& y);

struct AtomisticSolveOptions {
  double tol = 1e-10;  ///< on max_i |F_i + f_i| over free atoms
  int max_iters = 200;
  /// Any bond longer than this is treated as a separation and aborts the solve.
  double max_bond = 4.0;
};

/// Damped Newton on the free atoms -M..M with backtracking on the total energy.
///
/// Throws NonConvergence carrying the last iterate (positions -M..M+1) when the
/// iteration budget runs out or the chain separates.
AtomChain atomistic_solve(const PairPotential& p, const AtomChain& start, AtomisticSolveOptions opts = {});

}  // namespace qclab
