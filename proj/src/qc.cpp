#include "qclab/qc.hpp"

#include <cassert>

#include "qclab/chain.hpp"

namespace qclab {

IndexedVector interpolate(const QcMesh& m, const RepState& st) {
  IndexedVector y(-m.M(), m.M() + 1);
  for (int j = -m.N(); j <= m.N(); ++j) {
    const double r = (st.z(j + 1) - st.z(j)) / m.nu(j);
    for (int k = 0; k < m.nu(j); ++k) y(m.ell(j) + k) = st.z(j) + k * r;
  }
  y(m.M() + 1) = st.z(m.N() + 1);
  return y;
}

double cqc_energy(const PairPotential& p, const QcMesh& m, const RepState& st) {
  return atomistic_energy(p, interpolate(m, st));
}

namespace {

// sum over atoms in the support of hat function j of weight * field(atom)
IndexedVector conjugate_sum(const QcMesh& m, const IndexedVector& atom_field) {
  IndexedVector out(-m.N(), m.N());
  for (int j = -m.N(); j <= m.N(); ++j) {
    double acc = atom_field(m.ell(j));
    if (j > -m.N()) {
      const int nl = m.nu(j - 1);
      for (int i = 1; i < nl; ++i) acc += static_cast<double>(nl - i) / nl * atom_field(m.ell(j) - i);
    }
    const int nr = m.nu(j);
    for (int i = 1; i < nr; ++i) acc += static_cast<double>(nr - i) / nr * atom_field(m.ell(j) + i);
    out(j) = acc;
  }
  return out;
}

}  // namespace

IndexedVector cqc_forces(const PairPotential& p, const QcMesh& m, const RepState& st) {
  return conjugate_sum(m, atomistic_forces(p, interpolate(m, st)));
}

IndexedVector conjugate_external(const QcMesh& m, const IndexedVector& dead_loads) {
  return conjugate_sum(m, dead_loads);
}

EnergyDecomposition energy_decomposition(const PairPotential& p, const QcMesh& m, const Spacings& r, double a0) {
  EnergyDecomposition out;
  const int N = m.N();
  out.bulk = local_energy(p, m, r, a0);
  out.surface = -0.5 * p(2.0 * r(-N), 0) - 0.5 * p(2.0 * r(N), 0);
  for (int j = -N + 1; j <= N; ++j)
    out.interface += -0.5 * p(2.0 * r(j - 1), 0) + p(r(j - 1) + r(j), 0) - 0.5 * p(2.0 * r(j), 0);
  return out;
}

double local_energy(const PairPotential& p, const QcMesh& m, const Spacings& r, double a0) {
  double e = 0.0;
  for (int j = -m.N(); j <= m.N(); ++j) e += m.length(j, a0) * strain_energy(p, a0, r(j) / a0, 0);
  return e;
}

IndexedVector local_forces(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  IndexedVector f(-m.N(), m.N());
  for (int j = -m.N(); j <= m.N(); ++j)
    f(j) = uniform_stress(p, r(j)) - (j > -m.N() ? uniform_stress(p, r(j - 1)) : 0.0);
  return f;
}

namespace {

// phi'(r_a) or phi'(r_a + r_b); zero when an element lies outside the chain.
double bond_d1(const PairPotential& p, const Spacings& r, int a) {
  return r.contains(a) ? p(r(a), 1) : 0.0;
}
double bond_d1(const PairPotential& p, const Spacings& r, int a, int b) {
  return r.contains(a) && r.contains(b) ? p(r(a) + r(b), 1) : 0.0;
}

// I_j = 2 phi'(2 r_j) - phi'(r_j + r_{j-1}) - phi'(r_j + r_{j+1})
double interface_mismatch(const PairPotential& p, const Spacings& r, int j) {
  if (!r.contains(j)) return 0.0;
  return 2.0 * p(2.0 * r(j), 1) - bond_d1(p, r, j, j - 1) - bond_d1(p, r, j, j + 1);
}

}  // namespace

IndexedVector qcf_forces(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  IndexedVector f(-m.N(), m.N());
  for (int j = -m.N(); j <= m.N(); ++j) {
    if (m.is_atomistic(j)) {
      f(j) = (bond_d1(p, r, j) + bond_d1(p, r, j, j + 1)) - (bond_d1(p, r, j - 1) + bond_d1(p, r, j - 1, j - 2));
    } else {
      f(j) = uniform_stress(p, r(j)) - (r.contains(j - 1) ? uniform_stress(p, r(j - 1)) : 0.0);
    }
  }
  return f;
}

IndexedVector psi_qcf(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  return conjugate_load(qcf_forces(p, m, r));
}

IndexedVector psi_qcf_explicit(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  const int K = m.K();
  const double left_jump = interface_mismatch(p, r, -K);
  const double right_jump = interface_mismatch(p, r, K);
  IndexedVector psi(-m.N(), m.N());
  for (int j = -m.N(); j <= m.N(); ++j) {
    double minus_psi = 0.0;
    if (j <= -K) {
      minus_psi = uniform_stress(p, r(j));
    } else if (j <= K) {
      minus_psi = p(r(j), 1) + bond_d1(p, r, j, j - 1) + bond_d1(p, r, j, j + 1) + left_jump;
    } else {
      minus_psi = uniform_stress(p, r(j)) + left_jump - right_jump;
    }
    psi(j) = -minus_psi;
  }
  return psi;
}

QceModel::QceModel(const QcMesh& m) : mesh_(m) {
  const int N = m.N();
  auto in_range = [&](int j) { return j >= -N && j <= N; };

  // half of element e's L W(D) = nu_e (phi(r) + phi(2r)) / 2
  auto half_element = [&](int e) {
    if (!in_range(e)) return;
    const double w = 0.5 * m.nu(e);
    bonds_.push_back({w, e, 1.0, e, 0.0});
    bonds_.push_back({w, e, 2.0, e, 0.0});
  };
  auto half_bond = [&](int a) {
    if (in_range(a)) bonds_.push_back({0.5, a, 1.0, a, 0.0});
  };
  auto half_pair = [&](int a, int b) {
    if (in_range(a) && in_range(b)) bonds_.push_back({0.5, a, 1.0, b, 1.0});
  };

  for (int j = -N; j <= N + 1; ++j) {
    if (m.is_atomistic(j)) {
      half_bond(j);
      half_pair(j, j + 1);
      half_bond(j - 1);
      half_pair(j - 1, j - 2);
    } else {
      half_element(j);
      half_element(j - 1);
    }
  }
}

namespace {

double bond_argument(const QceBond& b, const Spacings& r) {
  return b.c1 * r(b.j1) + (b.c2 != 0.0 ? b.c2 * r(b.j2) : 0.0);
}

}  // namespace

double QceModel::energy(const PairPotential& p, const Spacings& r) const {
  double e = 0.0;
  for (const auto& b : bonds_) e += b.weight * p(bond_argument(b, r), 0);
  return e;
}

IndexedVector QceModel::gradient(const PairPotential& p, const Spacings& r) const {
  IndexedVector g(-mesh_.N(), mesh_.N());
  for (const auto& b : bonds_) {
    const double d = b.weight * p(bond_argument(b, r), 1);
    g(b.j1) += d * b.c1;
    if (b.c2 != 0.0) g(b.j2) += d * b.c2;
  }
  return g;
}

SymmetricBanded QceModel::hessian(const PairPotential& p, const Spacings& r) const {
  const int N = mesh_.N();
  SymmetricBanded h(static_cast<std::size_t>(2 * N + 1), 1);
  auto row = [N](int j) { return static_cast<std::size_t>(j + N); };
  for (const auto& b : bonds_) {
    const double d = b.weight * p(bond_argument(b, r), 2);
    h.at(row(b.j1), row(b.j1)) += d * b.c1 * b.c1;
    if (b.c2 != 0.0) {
      assert(b.j2 == b.j1 + 1 || b.j2 == b.j1 - 1);
      h.at(row(b.j2), row(b.j2)) += d * b.c2 * b.c2;
      h.at(row(b.j1), row(b.j2)) += d * b.c1 * b.c2;
    }
  }
  return h;
}

IndexedVector QceModel::psi(const PairPotential& p, const Spacings& r) const {
  IndexedVector psi = gradient(p, r);
  for (int j = -mesh_.N(); j <= mesh_.N(); ++j) psi(j) = -psi(j) / mesh_.nu(j);
  return psi;
}

double qce_energy(const PairPotential& p, const QcMesh& m, const Spacings& r) { return QceModel(m).energy(p, r); }

IndexedVector psi_qce(const PairPotential& p, const QcMesh& m, const Spacings& r) { return QceModel(m).psi(p, r); }

IndexedVector qce_forces(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  return forces_from_psi(psi_qce(p, m, r));
}

IndexedVector ghost_correction(const PairPotential& p, const QcMesh& m, const Spacings& r) {
  IndexedVector g = psi_qcf(p, m, r);
  const IndexedVector e = psi_qce(p, m, r);
  for (int j = g.first(); j <= g.last(); ++j) g(j) -= e(j);
  return g;
}

IndexedVector conjugate_load(const IndexedVector& f) {
  IndexedVector phi(f.first(), f.last());
  double acc = 0.0;
  for (int j = f.first(); j <= f.last(); ++j) {
    acc += f(j);
    phi(j) = -acc;
  }
  return phi;
}

IndexedVector forces_from_psi(const IndexedVector& psi) {
  IndexedVector f(psi.first(), psi.last());
  for (int j = psi.first(); j <= psi.last(); ++j) f(j) = -psi(j) + (j > psi.first() ? psi(j - 1) : 0.0);
  return f;
}

}  // namespace qclab
