#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclab/indexed.hpp"
#include "qclab/mesh.hpp"
#include "qclab/potential.hpp"
#include "qclab/qc.hpp"

namespace qclab {

/// Spacing box (r_L, r_U)^{2N+1} on which the preconditioned iteration contracts with rate alpha.
struct ContractionWindow {
  double r_L = 0.0;
  double r_U = 0.0;
  double alpha = 0.0;

  bool contains(double r) const { return r > r_L && r < r_U; }
  bool contains(const Spacings& r) const;
};

/// 16|phi''(2 r_L)| / (phi''(r_U) - 5|phi''(2 r_L)|); throws HypothesisViolation
/// when the denominator is not positive.
double contraction_constant(const PairPotential& p, double r_L, double r_U);

/// Window with alpha filled in from contraction_constant.
ContractionWindow make_window(const PairPotential& p, double r_L, double r_U);

namespace hypothesis {
inline constexpr const char* kLowerBound = "r_L_above_half_r_tilde_2";
inline constexpr const char* kOrdering = "r_L_below_r_U";
inline constexpr const char* kStiffness = "phi''(r_U)+21phi''(2r_L)>0";
inline constexpr const char* kLoadLower = "load_lower_bound";
inline constexpr const char* kLoadUpper = "load_upper_bound";
inline constexpr const char* kAlphaBelowOne = "alpha_below_one";
}  // namespace hypothesis

struct HypothesisFailure {
  std::string hypothesis;
  std::optional<int> j;  ///< set for per-repatom load inequalities
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisFailure> violations;
  bool certified() const { return violations.empty(); }
};

/// Checks the window inequalities and, for every j in Phi, the load bounds
/// phi'(r_L) + 6phi'(2r_L) - 4phi'(2r_U) < Phi_j < phi'(r_U) + 6phi'(2r_U) - 4phi'(2r_L).
HypothesisReport check_hypotheses(const PairPotential& p, const PotentialProfile& prof,
                                  const ContractionWindow& w, const IndexedVector& Phi);

struct SolverOptions {
  double inner_tol = 1e-12;  ///< on max_j |psi^QCE_j(r) - rhs_j|
  int inner_max_iters = 100;
  double fracture_factor = 1.5;  ///< fracture threshold = fracture_factor * r_tilde_1
  int max_outer = 200;
};

/// One accepted inner Newton iterate, kept for diagnosing breakdowns.
struct InnerStep {
  int iteration = 0;
  double max_spacing = 0.0;
  int element = 0;  ///< argmax of the spacings
};

struct InnerResult {
  Spacings r;
  int iterations = 0;
};

enum class TraceStatus { converged, max_iters, fracture, inner_failure };
const char* to_string(TraceStatus s);

struct StopRule {
  int max_iters = 200;
  std::optional<double> tol;  ///< stop once ||psi^QCF + Phi||_inf <= tol
};

struct IterationTrace {
  std::vector<Spacings> states;     ///< r^0, r^1, ...
  std::vector<double> residuals;    ///< ||psi^QCF(r^p) + Phi||_inf
  std::vector<bool> in_window;      ///< all false when no window was supplied
  std::vector<int> inner_iters;     ///< 0 for the initial state
  TraceStatus status = TraceStatus::max_iters;
  std::optional<Spacings> failure_state;  ///< last inner iterate of a failed solve
  std::vector<InnerStep> failure_path;    ///< inner iterates of the failed solve
  std::string failure_message;

  const Spacings& final_state() const { return states.back(); }
  int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// QCF equilibrium solver: each outer step solves the QCE problem
/// psi^QCE(r^{p+1}) = -Phi - psi^G(r^p) by Newton's method on the inner functional
/// E^QCE(r) + sum_j nu_j rhs_j r_j.
class QcfSolver {
 public:
  QcfSolver(PairPotential p, QcMesh m, SolverOptions opts = {});

  const PairPotential& potential() const { return pot_; }
  const QcMesh& mesh() const { return qce_.mesh(); }
  const PotentialProfile& profile() const { return prof_; }
  const SolverOptions& options() const { return opts_; }
  double fracture_threshold() const { return opts_.fracture_factor * prof_.r_tilde_1; }

  /// Throws InnerFailure (with fracture() set when a spacing passes the
  /// threshold). When path is given, every accepted iterate is appended to it.
  InnerResult inner_minimize(const IndexedVector& rhs, const Spacings& guess,
                             std::vector<InnerStep>* path = nullptr) const;

  /// One preconditioned step. inner_iters receives the Newton count when given.
  Spacings outer_iterate(const Spacings& r_p, const IndexedVector& Phi, int* inner_iters = nullptr) const;
  RepState outer_iterate(const RepState& z_p, const IndexedVector& Phi) const;

  /// psi^QCF(r) + Phi.
  IndexedVector residual(const Spacings& r, const IndexedVector& Phi) const;

  /// Failures of the inner solve end the trace with status fracture or inner_failure.
  IterationTrace solve_at_load(const Spacings& r0, const IndexedVector& Phi, StopRule stop,
                               std::optional<ContractionWindow> window = std::nullopt) const;

 private:
  PairPotential pot_;
  QceModel qce_;
  PotentialProfile prof_;
  SolverOptions opts_;
};

struct FractureReport {
  bool fractured = false;
  int element = 0;
  double spacing = 0.0;
};

/// Looks for a spacing above threshold in the trace states and the failure state.
FractureReport detect_fracture(const IterationTrace& trace, double threshold);

/// ||T r - T s||_inf / ||r - s||_inf for one outer step T at load Phi.
double contraction_ratio(const QcfSolver& solver, const IndexedVector& Phi, const Spacings& r, const Spacings& s);

/// Columns p, residual_inf, in_window, inner_iters.
void write_trace_csv(std::ostream& os, const IterationTrace& trace);
/// Status, step count, final residual, final state and failure details.
void write_trace_json(std::ostream& os, const IterationTrace& trace);

}  // namespace qclab
