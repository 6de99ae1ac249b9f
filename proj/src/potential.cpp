#include "qclab/potential.hpp"

#include <cmath>
#include <sstream>

#include "qclab/errors.hpp"
#include "qclab/roots.hpp"

namespace qclab {

PairPotential::PairPotential(std::string name, Law law) : name_(std::move(name)), law_(std::move(law)) {}

PairPotential PairPotential::lennard_jones() {
  return PairPotential("lennard-jones", [](double r, int order) {
    const double i6 = 1.0 / (r * r * r * r * r * r);
    const double i12 = i6 * i6;
    switch (order) {
      case 0:
        return i12 - 2.0 * i6;
      case 1:
        return (-12.0 * i12 + 12.0 * i6) / r;
      case 2:
        return (156.0 * i12 - 84.0 * i6) / (r * r);
      default:
        return (-2184.0 * i12 + 672.0 * i6) / (r * r * r);
    }
  });
}

double PairPotential::operator()(double r, int order) const {
  if (!(r > 0.0)) {
    std::ostringstream msg;
    msg << "pair potential evaluated at nonpositive distance r=" << r;
    throw DomainError(msg.str());
  }
  if (order < 0 || order > 3) throw DomainError("pair potential derivative order must be 0..3");
  return law_(r, order);
}

double phi_derivs(const PairPotential& p, double r, int order) { return p(r, order); }

double strain_energy(const PairPotential& p, double a0, double D, int order) {
  if (!(D > 0.0)) throw DomainError("strain energy needs a positive deformation gradient");
  const double r = D * a0;
  switch (order) {
    case 0:
      return (p(r, 0) + p(2.0 * r, 0)) / a0;
    case 1:
      return p(r, 1) + 2.0 * p(2.0 * r, 1);
    case 2:
      return a0 * (p(r, 2) + 4.0 * p(2.0 * r, 2));
    default:
      throw DomainError("strain energy derivative order must be 0..2");
  }
}

double uniform_stress(const PairPotential& p, double r) { return p(r, 1) + 2.0 * p(2.0 * r, 1); }

double uniform_stiffness(const PairPotential& p, double r) { return p(r, 2) + 4.0 * p(2.0 * r, 2); }

namespace {

double landmark(const char* name, const std::function<double(double)>& f,
                const std::function<double(double)>& df, double lo, double hi) {
  try {
    return find_root(f, df, lo, hi);
  } catch (const BracketError& e) {
    throw ProfileError(name, std::string("landmark ") + name + " not bracketed: " + e.what());
  }
}

}  // namespace

PotentialProfile compute_profile(const PairPotential& p) {
  PotentialProfile prof;
  prof.a0 = landmark(
      "a0", [&](double r) { return uniform_stress(p, r); }, [&](double r) { return uniform_stiffness(p, r); },
      0.5, 2.0);
  const double a0 = prof.a0;
  prof.r_tilde_1 = landmark(
      "r_tilde_1", [&](double r) { return p(r, 2); }, [&](double r) { return p(r, 3); }, a0, 2.0 * a0);
  prof.r_tilde_2 = landmark(
      "r_tilde_2", [&](double r) { return p(r, 3); }, {}, a0, 2.0 * a0);
  prof.r_star = landmark(
      "r_star", [&](double r) { return uniform_stiffness(p, r); },
      [&](double r) { return p(r, 3) + 8.0 * p(2.0 * r, 3); }, a0, 2.0 * a0);
  prof.D_tilde = landmark(
      "D_tilde", [&](double D) { return strain_energy(p, a0, D, 2); },
      [&](double D) { return a0 * a0 * (p(D * a0, 3) + 8.0 * p(2.0 * D * a0, 3)); }, 1.0, 2.0);
  prof.phi_max = uniform_stress(p, prof.r_star);
  return prof;
}

bool AssumptionReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

constexpr double kSignBoundaryTol = 1e-9;
constexpr int kSamplesPerSide = 4000;

// f must be positive on (lo, x0) and negative on (x0, hi) (or the reverse if
// positive_first is false). The landmark x0 itself is sampled as well.
AssumptionCheck sign_change(const char* name, const std::function<double(double)>& f, double lo, double x0,
                            double hi, bool positive_first) {
  AssumptionCheck check{name, true, ""};
  auto sample = [&](double x, int expected_sign) {
    const double v = f(x);
    if (std::abs(v) <= kSignBoundaryTol) return;
    const int sign = v > 0.0 ? 1 : -1;
    if (sign != expected_sign && check.passed) {
      check.passed = false;
      std::ostringstream msg;
      msg << "value " << v << " at " << x << " has the wrong sign";
      check.detail = msg.str();
    }
  };
  const int before = positive_first ? 1 : -1;
  if (x0 > lo) {
    for (int i = 0; i < kSamplesPerSide; ++i) sample(lo + (x0 - lo) * i / kSamplesPerSide, before);
  }
  sample(x0, before);  // on the boundary; only fails if clearly off zero
  if (hi > x0) {
    for (int i = 1; i <= kSamplesPerSide; ++i) sample(x0 + (hi - x0) * i / kSamplesPerSide, -before);
  }
  if (check.passed) {
    std::ostringstream msg;
    msg << "sign change at " << x0;
    check.detail = msg.str();
  }
  return check;
}

}  // namespace

AssumptionReport verify_assumptions(const PairPotential& p, const PotentialProfile& prof) {
  AssumptionReport report;
  const double a0 = prof.a0;
  constexpr double kRmin = 0.6;
  constexpr double kRmax = 5.0;
  constexpr double kDmin = 0.6;
  constexpr double kDmax = 4.0;

  report.checks.push_back(sign_change(
      assumption::kPhi2Sign, [&](double r) { return p(r, 2); }, kRmin, prof.r_tilde_1, kRmax, true));
  report.checks.push_back(sign_change(
      assumption::kPhi3Sign, [&](double r) { return p(r, 3); }, kRmin, prof.r_tilde_2, kRmax, false));
  report.checks.push_back(sign_change(
      assumption::kW1Sign, [&](double D) { return strain_energy(p, a0, D, 1); }, kDmin, 1.0, kDmax, false));
  report.checks.push_back(sign_change(
      assumption::kW2Sign, [&](double D) { return strain_energy(p, a0, D, 2); }, kDmin, prof.D_tilde, kDmax,
      true));

  {
    const bool ok = 0.0 < a0 && a0 < prof.r_tilde_1 && prof.r_tilde_1 < prof.r_tilde_2 && prof.r_tilde_2 < 2.0 * a0;
    std::ostringstream msg;
    msg << "a0=" << a0 << " r_tilde_1=" << prof.r_tilde_1 << " r_tilde_2=" << prof.r_tilde_2
        << " 2a0=" << 2.0 * a0;
    report.checks.push_back({assumption::kOrdering, ok, msg.str()});
  }
  {
    std::ostringstream msg;
    msg << "D_tilde=" << prof.D_tilde;
    report.checks.push_back({assumption::kDTildeAboveOne, prof.D_tilde > 1.0, msg.str()});
  }
  return report;
}

}  // namespace qclab
