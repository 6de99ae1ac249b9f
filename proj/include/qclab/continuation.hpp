#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclab/potential.hpp"
#include "qclab/solver.hpp"

namespace qclab {

/// Uniform tension Phi(s) = scale * s applied at the free end.
struct LoadPath {
  double scale = 2.76;
  double operator()(double s) const { return scale * s; }
};

/// Root r of phi'(r) + 2phi'(2r) = Phi(s) on the stable branch (below r_star).
///
/// Small negative s is accepted (compressive load) so that r(s) can be
/// differenced at s = 0. Throws NoSolution when Phi(s) >= phi_max.
double uniform_response(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s);

/// Load at which the alpha-window closes: the s where delta(s) reaches zero.
double terminal_load(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double alpha);

/// Half-width delta of the window centred on r(s): the root of
/// phi''(r + delta) + (5 + 16/alpha) phi''(2(r - delta)) = 0 on (0, r - r_tilde_2/2).
/// Throws WindowExhausted when no positive root exists.
double contraction_radius(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s,
                          double alpha);

/// (r(s) - delta, r(s) + delta, alpha).
ContractionWindow window_at(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s,
                            double alpha);

/// Rate bound k(s) = |r'(s)|, cumulative bound kappa(s) = int_0^s k, and the
/// interpolation constant k2 >= max|r''|/2, all on [0, s_max].
class GrowthBounds {
 public:
  GrowthBounds(PairPotential p, PotentialProfile prof, LoadPath path, double s_max = 1.0);

  const PairPotential& potential() const { return pot_; }
  const PotentialProfile& profile() const { return prof_; }
  const LoadPath& path() const { return path_; }
  double s_max() const { return s_max_; }

  double r(double s) const { return uniform_response(pot_, prof_, path_, s); }
  /// scale / (phi''(r) + 4phi''(2r)); DomainError at or past the load limit.
  double k(double s) const;
  /// Cubic Hermite interpolation of the tabulated quadrature.
  double kappa(double s) const;
  double k2() const { return k2_; }

  static constexpr int kPanels = 2048;
  static constexpr int kCurvatureGrid = 4096;

 private:
  PairPotential pot_;
  PotentialProfile prof_;
  LoadPath path_;
  double s_max_;
  std::vector<double> kappa_nodes_;
  std::vector<double> k_nodes_;
  double k2_ = 0.0;
};

/// The abstract ingredients the planners need: kappa(s), delta(s), alpha, gamma0.
struct ContinuationProfile {
  std::function<double(double)> kappa;
  std::function<double(double)> delta;  ///< zero once the window has closed
  double alpha = 0.0;
  double gamma0 = 0.0;

  /// kappa(s) = k s, delta(s) = delta.
  static ContinuationProfile constant(double k, double delta, double alpha, double gamma0 = 0.0);
  /// kappa from the growth bounds, delta from contraction_radius.
  static ContinuationProfile qc(const GrowthBounds& g, double alpha, double gamma0 = 0.0);
};

/// Load steps s_0 = 0 <= ... <= s_Q = 1 with iteration counts and supersolution values.
/// Index 0 is the initial state: P[0] = 0 and gamma[0] = gamma0.
struct LoadPlan {
  std::vector<double> s;
  std::vector<int> P;
  std::vector<double> gamma;

  int Q() const { return static_cast<int>(s.size()) - 1; }
  long work() const;
};

/// kappa(s_q) - kappa(s_{q-1}) + gamma_{q-1}: the error bound entering step q.
double step_bracket(const ContinuationProfile& prof, double s_prev, double gamma_prev, double s);

/// gamma_q = alpha^{P_q} (kappa(s_q) - kappa(s_{q-1}) + gamma_{q-1}).
std::vector<double> supersolution(const std::vector<double>& s, const std::vector<int>& P,
                                  const ContinuationProfile& prof);

struct UniformConstants {
  double delta = 0.0;  ///< smallest contraction radius on [0, 1]
  double k = 0.0;      ///< largest rate bound on [0, 1]
  double k2 = 0.0;
  double alpha = 0.0;
};

/// Worst-case constants of the QC problem on [0, 1].
UniformConstants uniform_constants(const GrowthBounds& g, double alpha);

struct UniformPlan {
  double h_opt = 0.0;
  int P = 0;
  int Q = 0;
  long work = 0;
};

/// h_opt = min((delta - eps)/k, sqrt(eps/k2)), P = ceil(ln(eps/(eps + k h))/ln alpha).
/// Throws PreconditionError unless 0 < eps < delta.
UniformPlan plan_uniform(const UniformConstants& c, double eps);

/// Equal steps of size h_opt (the last one truncated at s = 1), P iterations each.
LoadPlan to_load_plan(const UniformPlan& u, const ContinuationProfile& prof);

/// Largest s in [s_prev, 1] with step_bracket <= delta(s).
double max_step(const ContinuationProfile& prof, double s_prev, double gamma_prev);

/// Greedy plan: maximal steps with one iteration each, then enough iterations
/// at s = 1 to bring gamma below eps. Throws StallError if the window closes
/// before s = 1, PreconditionError if gamma0 >= delta(0) or eps <= 0.
LoadPlan plan_endpoint(const ContinuationProfile& prof, double eps, int max_steps = 100000);

/// Single step s: 0 -> 1 with P iterations.
LoadPlan plan_single_step(const ContinuationProfile& prof, int P);

struct Admissibility {
  bool admissible = true;
  int q = -1;  ///< first offending step, -1 when admissible
  std::string reason;
};

/// Ordering, counts (P_q >= 1 for q < Q, P_Q >= 0), the window constraint
/// step_bracket <= delta(s_q), and gamma_Q <= eps, with gamma recomputed from (s, P).
Admissibility is_admissible(const LoadPlan& plan, const ContinuationProfile& prof, double eps);

/// Moves every non-final load step forward to the edge of its window, keeping the counts.
LoadPlan maximize_steps(const LoadPlan& plan, const ContinuationProfile& prof);

/// Splits step j (1 <= j < Q-1, P_j > 1) into a one-iteration step at s_j and a
/// new step carrying the other P_j - 1 iterations, placed where
/// kappa(s) - kappa(s_j) + alpha * bracket_j = delta(s). Throws RewriteInapplicable.
LoadPlan split_step(const LoadPlan& plan, int j, const ContinuationProfile& prof);

enum class RunStatus { completed, fracture, inner_failure, hypothesis_violation };
const char* to_string(RunStatus s);

struct PlanRun {
  RunStatus status = RunStatus::completed;
  int failed_step = -1;
  std::vector<IterationTrace> traces;  ///< traces[q-1] belongs to step q
  std::vector<Spacings> states;        ///< r_0 .. r_q for completed steps
  std::vector<double> errors;          ///< e_q = ||r_q - r(s_q) e||_inf
  std::vector<HypothesisReport> certificates;  ///< per step, when certification is on
  double final_residual = 0.0;
  std::string message;
};

struct RunOptions {
  bool certify = true;  ///< check the window hypotheses at every s_q before iterating
};

/// Executes the plan from r(0) e with zeroth-order starts.
PlanRun run_plan(const QcfSolver& solver, const GrowthBounds& g, const LoadPlan& plan, double alpha,
                 RunOptions opts = {});

/// Max-norm distance between the piecewise-linear interpolant of the computed
/// states and r(s) e, sampled at `per_step` points inside every step.
double interpolant_path_error(const GrowthBounds& g, const LoadPlan& plan, const PlanRun& run, int per_step = 16);

/// Columns q, s_q, P_q, gamma_q.
void write_plan_csv(std::ostream& os, const LoadPlan& plan);
/// Columns s, r, r - delta, r + delta; rows stop where the window closes, and the
/// last row is the closing point itself.
void write_band_csv(std::ostream& os, const GrowthBounds& g, double alpha, int points = 512);
/// Columns q, s_q, e_q, delta(s_q), gamma_q for an executed plan.
void write_staircase_csv(std::ostream& os, const LoadPlan& plan, const PlanRun& run, const ContinuationProfile& prof);

}  // namespace qclab
