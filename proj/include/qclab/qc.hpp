#pragma once

#include <vector>

#include "qclab/banded.hpp"
#include "qclab/indexed.hpp"
#include "qclab/mesh.hpp"
#include "qclab/potential.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Constrained and local approximations (functions of repatom positions)
// ---------------------------------------------------------------------------

/// Atom positions from repatom positions through the piecewise-linear hat functions.
IndexedVector interpolate(const QcMesh& m, const RepState& st);

/// Atomistic energy of the interpolated chain.
double cqc_energy(const PairPotential& p, const QcMesh& m, const RepState& st);
/// Conjugate atomistic forces on repatoms -N..N (hat-function weighted sums of atom forces).
IndexedVector cqc_forces(const PairPotential& p, const QcMesh& m, const RepState& st);

/// Dead loads on atoms -M..M conjugated to repatoms -N..N with the same weights.
IndexedVector conjugate_external(const QcMesh& m, const IndexedVector& dead_loads);

struct EnergyDecomposition {
  double bulk = 0.0;       ///< sum_j L_j W(D_j)
  double surface = 0.0;    ///< the two free-end terms
  double interface = 0.0;  ///< element-junction terms, second divided differences of phi
  double total() const { return bulk + surface + interface; }
};

/// Splits the constrained energy into bulk, surface and interface parts.
EnergyDecomposition energy_decomposition(const PairPotential& p, const QcMesh& m, const Spacings& r, double a0);

/// sum_j L_j W(D_j).
double local_energy(const PairPotential& p, const QcMesh& m, const Spacings& r, double a0);
/// F^L_j = W'(D_j) - W'(D_{j-1}) on repatoms -N..N.
IndexedVector local_forces(const PairPotential& p, const QcMesh& m, const Spacings& r);

// ---------------------------------------------------------------------------
// Force-based (QCF) and energy-based (QCE) coupling
// ---------------------------------------------------------------------------

/// QCF forces on repatoms -N..N: atomistic formula on atomistic repatoms, local
/// formula on continuum repatoms.
IndexedVector qcf_forces(const PairPotential& p, const QcMesh& m, const Spacings& r);

/// psi^QCF_j = -sum_{i<=j} F^QCF_i.
IndexedVector psi_qcf(const PairPotential& p, const QcMesh& m, const Spacings& r);
/// Closed-form evaluation of psi^QCF; independent of qcf_forces.
IndexedVector psi_qcf_explicit(const PairPotential& p, const QcMesh& m, const Spacings& r);

/// One pair term of the QCE energy: weight * phi(c1 r_{j1} + c2 r_{j2}).
struct QceBond {
  double weight = 0.0;
  int j1 = 0;
  double c1 = 0.0;
  int j2 = 0;
  double c2 = 0.0;  ///< zero for single-element bonds
};

/// Energy-based coupling assembled as a list of weighted pair terms in the spacings.
///
/// Continuum repatoms carry half of each adjacent element's L W(D), atomistic
/// repatoms half of each bond they take part in. The Hessian in r is
/// tridiagonal because no bond spans more than two neighboring elements.
class QceModel {
 public:
  explicit QceModel(const QcMesh& m);

  const QcMesh& mesh() const { return mesh_; }
  const std::vector<QceBond>& bonds() const { return bonds_; }

  double energy(const PairPotential& p, const Spacings& r) const;
  /// dE/dr_j.
  IndexedVector gradient(const PairPotential& p, const Spacings& r) const;
  /// d2E/dr_i dr_j, elements mapped to rows 0..2N.
  SymmetricBanded hessian(const PairPotential& p, const Spacings& r) const;
  /// psi^QCE_j = -(1/nu_j) dE/dr_j.
  IndexedVector psi(const PairPotential& p, const Spacings& r) const;

 private:
  QcMesh mesh_;
  std::vector<QceBond> bonds_;
};

double qce_energy(const PairPotential& p, const QcMesh& m, const Spacings& r);
IndexedVector psi_qce(const PairPotential& p, const QcMesh& m, const Spacings& r);
/// F^QCE_j = -psi_j + psi_{j-1} with psi_{-N-1} = 0.
IndexedVector qce_forces(const PairPotential& p, const QcMesh& m, const Spacings& r);

/// psi^G = psi^QCF - psi^QCE.
IndexedVector ghost_correction(const PairPotential& p, const QcMesh& m, const Spacings& r);

/// Phi_j = -sum_{i<=j} f_i.
IndexedVector conjugate_load(const IndexedVector& f);

/// Repatom forces from conjugate stresses: F_j = -psi_j + psi_{j-1}.
IndexedVector forces_from_psi(const IndexedVector& psi);

}  // namespace qclab
