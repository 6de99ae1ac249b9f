#include <doctest.h>

#include <cmath>

#include "qclab/chain.hpp"
#include "qclab/errors.hpp"

using namespace qclab;

namespace {

// Positions of a non-uniformly strained chain.
AtomChain wavy_chain(int M, double spacing) {
  AtomChain c = AtomChain::uniform(M, spacing);
  for (int i = -M; i <= M; ++i) c.y(i) += 0.02 * std::sin(1.3 * i);
  return c;
}

}  // namespace

TEST_CASE("uniform chain layout") {
  const AtomChain c = AtomChain::uniform(4, 1.1);
  CHECK(c.y.first() == -4);
  CHECK(c.y.last() == 5);
  CHECK(c.dead_loads.first() == -4);
  CHECK(c.dead_loads.last() == 4);
  CHECK(c.fixed_end() == doctest::Approx(5.5));
  CHECK(max_abs(c.dead_loads) == 0.0);
}

TEST_CASE("atomistic forces are minus the energy gradient") {
  const auto p = PairPotential::lennard_jones();
  const AtomChain c = wavy_chain(6, 1.02);
  const IndexedVector f = atomistic_forces(p, c);
  for (int i = -6; i <= 6; ++i) {
    const double h = 1e-6;
    AtomChain plus = c, minus = c;
    plus.y(i) += h;
    minus.y(i) -= h;
    const double fd = -(atomistic_energy(p, plus) - atomistic_energy(p, minus)) / (2 * h);
    CAPTURE(i);
    CHECK(std::abs(fd - f(i)) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("energy counts nearest and second neighbours once") {
  const auto p = PairPotential::lennard_jones();
  const int M = 3;
  const AtomChain c = AtomChain::uniform(M, 1.05);
  const int atoms = 2 * M + 2;
  const double expect = (atoms - 1) * p(1.05, 0) + (atoms - 2) * p(2.1, 0);
  CHECK(atomistic_energy(p, c) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("end atom of the undeformed chain feels the unbalanced bonds") {
  const auto p = PairPotential::lennard_jones();
  const double a0 = std::pow((1.0 + std::pow(2.0, -12)) / (1.0 + std::pow(2.0, -6)), 1.0 / 6.0);
  const AtomChain c = AtomChain::uniform(5, a0);
  const IndexedVector f = atomistic_forces(p, c);
  CHECK(f(-5) == doctest::Approx(p(a0, 1) + p(2 * a0, 1)).epsilon(1e-12));
  CHECK(f(-4) == doctest::Approx(p(2 * a0, 1)).epsilon(1e-12));
  for (int i = -3; i <= 4; ++i) CHECK(std::abs(f(i)) <= 1e-13);
  // atom M has no second neighbour beyond the clamped atom
  CHECK(f(5) == doctest::Approx(-p(2 * a0, 1)).epsilon(1e-12));
}

TEST_CASE("tension load acts on the free end only") {
  const IndexedVector f = tension_load(4, 1.5);
  CHECK(f(-4) == -1.5);
  for (int i = -3; i <= 4; ++i) CHECK(f(i) == 0.0);
}

TEST_CASE("unordered positions are rejected") {
  const auto p = PairPotential::lennard_jones();
  AtomChain c = AtomChain::uniform(3, 1.0);
  c.y(0) = c.y(1);
  CHECK_THROWS_AS(atomistic_energy(p, c), DomainError);
  CHECK_THROWS_AS(atomistic_forces(p, c), DomainError);
}

TEST_CASE("newton oracle reaches equilibrium under tension") {
  const auto p = PairPotential::lennard_jones();
  const int M = 10;
  AtomChain start = AtomChain::uniform(M, 1.0);
  start.dead_loads = tension_load(M, 1.5);
  const AtomChain sol = atomistic_solve(p, start);
  const IndexedVector f = atomistic_forces(p, sol);
  double res = 0.0;
  for (int i = -M; i <= M; ++i) res = std::max(res, std::abs(f(i) + sol.dead_loads(i)));
  CHECK(res <= 1e-10);
  CHECK(sol.fixed_end() == start.fixed_end());
  // every cut carries the applied tension
  for (int i = -M; i <= M - 1; ++i) {
    double cut = p(sol.y(i + 1) - sol.y(i), 1);
    if (i - 1 >= -M) cut += p(sol.y(i + 1) - sol.y(i - 1), 1);
    if (i + 2 <= M + 1) cut += p(sol.y(i + 2) - sol.y(i), 1);
    CHECK(cut == doctest::Approx(1.5).epsilon(1e-9));
  }
}

TEST_CASE("load beyond the limit separates the chain") {
  const auto p = PairPotential::lennard_jones();
  AtomChain start = AtomChain::uniform(6, 1.0);
  start.dead_loads = tension_load(6, 3.0);
  try {
    atomistic_solve(p, start);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.last_iterate().size() == start.y.size());
  }
}
