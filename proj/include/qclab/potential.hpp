#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qclab {

/// Pair interaction phi(r) supplied with its first three analytic derivatives.
///
/// The law receives (r, order) with order in 0..3 and r > 0. Units are the
/// reduced Lennard-Jones units: well depth and equilibrium pair distance are 1.
class PairPotential {
 public:
  using Law = std::function<double(double r, int order)>;

  PairPotential(std::string name, Law law);

  /// phi(r) = r^-12 - 2 r^-6.
  static PairPotential lennard_jones();

  const std::string& name() const { return name_; }
  double operator()(double r, int order) const;

 private:
  std::string name_;
  Law law_;
};

/// phi^(order)(r); throws DomainError for r <= 0 or order outside 0..3.
double phi_derivs(const PairPotential& p, double r, int order);

/// Second-neighbor strain-energy density W(D) = (phi(D a0) + phi(2 D a0)) / a0 and its
/// first two D-derivatives.
double strain_energy(const PairPotential& p, double a0, double D, int order);

/// phi'(r) + 2 phi'(2r): the conjugate stress of a uniformly strained chain (= W'(r/a0)).
double uniform_stress(const PairPotential& p, double r);
/// d/dr of uniform_stress: phi''(r) + 4 phi''(2r).
double uniform_stiffness(const PairPotential& p, double r);

/// Landmark quantities of a pair potential under second-neighbor interaction.
struct PotentialProfile {
  double a0 = 0.0;         ///< equilibrium spacing, root of phi'(r) + 2 phi'(2r)
  double r_tilde_1 = 0.0;  ///< inflection point of phi (root of phi'')
  double r_tilde_2 = 0.0;  ///< root of phi'''
  double D_tilde = 0.0;    ///< root of W'' (stretch at the load limit)
  double phi_max = 0.0;    ///< load limit: max of phi'(r) + 2 phi'(2r)
  double r_star = 0.0;     ///< spacing attaining phi_max

  bool operator==(const PotentialProfile&) const = default;
};

/// Locates every landmark by bracketed root solves; throws ProfileError naming
/// the first landmark whose bracket has no sign change.
PotentialProfile compute_profile(const PairPotential& p);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  /// nullptr if no check carries that name.
  const AssumptionCheck* find(const std::string& name) const;
};

/// Names of the six shape conditions, in report order.
namespace assumption {
inline constexpr const char* kPhi2Sign = "phi''_sign";
inline constexpr const char* kPhi3Sign = "phi'''_sign";
inline constexpr const char* kW1Sign = "W'_sign";
inline constexpr const char* kW2Sign = "W''_sign";
inline constexpr const char* kOrdering = "landmark_ordering";
inline constexpr const char* kDTildeAboveOne = "D_tilde_gt_1";
}  // namespace assumption

/// Samples the sign conditions on dense grids around the profile landmarks and
/// checks the landmark ordering. Samples with |value| <= 1e-9 count as the sign
/// boundary and are not held against the condition.
AssumptionReport verify_assumptions(const PairPotential& p, const PotentialProfile& prof);

}  // namespace qclab
