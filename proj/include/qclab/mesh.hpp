#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "qclab/indexed.hpp"

namespace qclab {

/// Representative-atom layout of a chain with atoms -M..M+1.
///
/// Repatom j = -N..N+1 sits on atom ell(j). Repatoms -K+1..K are atomistic, the
/// rest continuum. Elements -K-1..K+1 are unit elements (nu = 1) so that the
/// atomistic forces never need interpolation, and the layout is mirror
/// symmetric: ell(1-j) = 1 - ell(j).
class QcMesh {
 public:
  /// Uncoarsened mesh: M = N, every atom is a repatom.
  static QcMesh uniform(int N, int K);
  /// Continuum elements outside the unit band share the remaining atoms as evenly as possible.
  static QcMesh coarsened(int M, int N, int K);
  /// ell lists ell(-N)..ell(N+1); throws MeshError if an invariant fails.
  static QcMesh from_indices(int M, int K, std::vector<int> ell);

  int M() const { return M_; }
  int N() const { return N_; }
  int K() const { return K_; }

  int ell(int j) const { return ell_[static_cast<std::size_t>(j + N_)]; }
  /// nu(j) = ell(j+1) - ell(j), the number of atom spacings in element j.
  int nu(int j) const { return ell(j + 1) - ell(j); }
  /// Element length L_j in the reference configuration.
  double length(int j, double a0) const { return nu(j) * a0; }

  bool is_atomistic(int j) const { return j >= -K_ + 1 && j <= K_; }
  bool is_element(int j) const { return j >= -N_ && j <= N_; }

  const std::vector<int>& indices() const { return ell_; }

  bool operator==(const QcMesh&) const = default;

 private:
  QcMesh(int M, int N, int K, std::vector<int> ell);

  int M_ = 0;
  int N_ = 0;
  int K_ = 0;
  std::vector<int> ell_;
};

/// Element spacings r_j, j = -N..N.
using Spacings = IndexedVector;

/// Repatom positions z_j, j = -N..N+1, with z(N+1) the clamped end.
struct RepState {
  IndexedVector z;

  /// z_j = ell_j * spacing.
  static RepState uniform(const QcMesh& m, double spacing);
  /// Rebuilds positions from spacings by summing leftwards from the fixed end.
  static RepState from_spacings(const QcMesh& m, const Spacings& r, double z_end);

  double fixed_end() const { return z(z.last()); }
  /// r_j = (z_{j+1} - z_j) / nu_j.
  Spacings spacings(const QcMesh& m) const;
  /// D_j = r_j / a0.
  IndexedVector deformation_gradients(const QcMesh& m, double a0) const;
};

/// All-equal spacings over the elements of m.
Spacings uniform_spacings(const QcMesh& m, double spacing);

/// Line-oriented text: "M N K", then the ell list, then the z list.
///
/// Numbers are written in shortest round-trip form, so reading back reproduces
/// every position bit for bit.
void write_mesh_state(std::ostream& os, const QcMesh& m, const RepState& st);
std::pair<QcMesh, RepState> read_mesh_state(std::istream& is);

}  // namespace qclab
