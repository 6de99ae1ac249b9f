#include "qclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qclab/banded.hpp"
#include "qclab/errors.hpp"
#include "qclab/format.hpp"

namespace qclab {

bool ContractionWindow::contains(const Spacings& r) const {
  return std::all_of(r.values().begin(), r.values().end(), [this](double v) { return contains(v); });
}

double contraction_constant(const PairPotential& p, double r_L, double r_U) {
  const double soft = std::abs(p(2.0 * r_L, 2));
  const double denom = p(r_U, 2) - 5.0 * soft;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "contraction constant undefined: phi''(r_U) - 5|phi''(2 r_L)| = " << denom << " for r_L=" << r_L
        << ", r_U=" << r_U;
    throw HypothesisViolation(msg.str());
  }
  return 16.0 * soft / denom;
}

ContractionWindow make_window(const PairPotential& p, double r_L, double r_U) {
  return {r_L, r_U, contraction_constant(p, r_L, r_U)};
}

HypothesisReport check_hypotheses(const PairPotential& p, const PotentialProfile& prof,
                                  const ContractionWindow& w, const IndexedVector& Phi) {
  HypothesisReport rep;
  auto fail = [&](const char* name, std::optional<int> j, const std::string& detail) {
    rep.violations.push_back({name, j, detail});
  };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };

  if (!(w.r_L > 0.5 * prof.r_tilde_2))
    fail(hypothesis::kLowerBound, std::nullopt, "r_L=" + num(w.r_L) + " <= r_tilde_2/2=" + num(0.5 * prof.r_tilde_2));
  if (!(w.r_L < w.r_U)) fail(hypothesis::kOrdering, std::nullopt, "r_L=" + num(w.r_L) + " >= r_U=" + num(w.r_U));
  if (w.r_L <= 0.0 || w.r_U <= 0.0) return rep;  // the potential is undefined beyond this point

  const double stiff = p(w.r_U, 2) + 21.0 * p(2.0 * w.r_L, 2);
  if (!(stiff > 0.0)) fail(hypothesis::kStiffness, std::nullopt, "value " + num(stiff));

  const double denom = p(w.r_U, 2) - 5.0 * std::abs(p(2.0 * w.r_L, 2));
  if (!(denom > 0.0)) {
    fail(hypothesis::kAlphaBelowOne, std::nullopt, "nonpositive denominator " + num(denom));
  } else {
    const double alpha = 16.0 * std::abs(p(2.0 * w.r_L, 2)) / denom;
    if (!(alpha < 1.0)) fail(hypothesis::kAlphaBelowOne, std::nullopt, "alpha=" + num(alpha));
  }

  const double lo = p(w.r_L, 1) + 6.0 * p(2.0 * w.r_L, 1) - 4.0 * p(2.0 * w.r_U, 1);
  const double hi = p(w.r_U, 1) + 6.0 * p(2.0 * w.r_U, 1) - 4.0 * p(2.0 * w.r_L, 1);
  for (int j = Phi.first(); j <= Phi.last(); ++j) {
    if (!(Phi(j) > lo)) fail(hypothesis::kLoadLower, j, "Phi=" + num(Phi(j)) + " <= " + num(lo));
    if (!(Phi(j) < hi)) fail(hypothesis::kLoadUpper, j, "Phi=" + num(Phi(j)) + " >= " + num(hi));
  }
  return rep;
}

const char* to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::converged: return "converged";
    case TraceStatus::max_iters: return "max-iters";
    case TraceStatus::fracture: return "fracture";
    case TraceStatus::inner_failure: return "inner-failure";
  }
  return "unknown";
}

QcfSolver::QcfSolver(PairPotential p, QcMesh m, SolverOptions opts)
    : pot_(std::move(p)), qce_(std::move(m)), prof_(compute_profile(pot_)), opts_(opts) {}

namespace {

double inner_residual(const QceModel& qce, const PairPotential& p, const IndexedVector& rhs, const Spacings& r) {
  const IndexedVector psi = qce.psi(p, r);
  double res = 0.0;
  for (int j = r.first(); j <= r.last(); ++j) res = std::max(res, std::abs(psi(j) - rhs(j)));
  return res;
}

double inner_functional(const QceModel& qce, const PairPotential& p, const IndexedVector& rhs, const Spacings& r) {
  double g = qce.energy(p, r);
  for (int j = r.first(); j <= r.last(); ++j) g += qce.mesh().nu(j) * rhs(j) * r(j);
  return g;
}

int argmax(const Spacings& r) {
  int best = r.first();
  for (int j = r.first(); j <= r.last(); ++j)
    if (r(j) > r(best)) best = j;
  return best;
}

}  // namespace

InnerResult QcfSolver::inner_minimize(const IndexedVector& rhs, const Spacings& guess,
                                      std::vector<InnerStep>* path) const {
  const QcMesh& m = qce_.mesh();
  const int N = m.N();
  for (double v : guess.values())
    if (!(v > 0.0)) throw InnerFailure("inner solve needs positive spacings", guess.vector(), false, 0);

  Spacings r = guess;
  double res = inner_residual(qce_, pot_, rhs, r);
  int it = 0;
  for (; res > opts_.inner_tol; ++it) {
    if (it == opts_.inner_max_iters) {
      std::ostringstream msg;
      msg << "inner solve did not reach tolerance in " << it << " Newton steps (residual " << res << ")";
      throw InnerFailure(msg.str(), r.vector(), false, 0);
    }

    // gradient of the inner functional: nu_j (rhs_j - psi_j)
    const IndexedVector psi = qce_.psi(pot_, r);
    std::vector<double> grad(r.size()), step(r.size());
    for (int j = -N; j <= N; ++j) grad[static_cast<std::size_t>(j + N)] = m.nu(j) * (rhs(j) - psi(j));

    SymmetricBanded h = qce_.hessian(pot_, r);
    BandedLdlt ldlt;
    bool shifted = false;
    if (!ldlt.factor(h)) {
      shifted = true;
      double shift = std::max(1e-8, 1e-6 * h.max_abs_diagonal());
      for (;;) {
        SymmetricBanded hs = h;
        hs.add_to_diagonal(shift);
        if (ldlt.factor(hs)) break;
        shift *= 4.0;
      }
    }
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = -grad[i];
    ldlt.solve(step);

    double slope = 0.0;
    for (std::size_t i = 0; i < step.size(); ++i) slope += grad[i] * step[i];
    const double g0 = inner_functional(qce_, pot_, rhs, r);

    bool accepted = false;
    Spacings trial = r;
    double trial_res = 0.0;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      bool positive = true;
      for (int j = -N; j <= N; ++j) {
        trial(j) = r(j) + t * step[static_cast<std::size_t>(j + N)];
        positive = positive && trial(j) > 0.0;
      }
      if (!positive) continue;
      trial_res = inner_residual(qce_, pot_, rhs, trial);
      const bool armijo = inner_functional(qce_, pot_, rhs, trial) <= g0 + 1e-4 * t * slope;
      if (armijo || (!shifted && trial_res < res)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "inner line search failed at Newton step " << it << " (residual " << res << ")";
      throw InnerFailure(msg.str(), r.vector(), false, 0);
    }
    r = trial;
    res = trial_res;

    const int worst = argmax(r);
    if (path) path->push_back({it + 1, r(worst), worst});
    if (r(worst) > fracture_threshold()) {
      std::ostringstream msg;
      msg << "fracture: spacing " << r(worst) << " of element " << worst << " exceeds " << fracture_threshold();
      throw InnerFailure(msg.str(), r.vector(), true, worst);
    }
  }
  return {r, it};
}

Spacings QcfSolver::outer_iterate(const Spacings& r_p, const IndexedVector& Phi, int* inner_iters) const {
  const IndexedVector ghost = ghost_correction(pot_, qce_.mesh(), r_p);
  IndexedVector rhs(r_p.first(), r_p.last());
  for (int j = rhs.first(); j <= rhs.last(); ++j) rhs(j) = -Phi(j) - ghost(j);
  InnerResult res = inner_minimize(rhs, r_p);
  if (inner_iters) *inner_iters = res.iterations;
  return res.r;
}

RepState QcfSolver::outer_iterate(const RepState& z_p, const IndexedVector& Phi) const {
  return RepState::from_spacings(mesh(), outer_iterate(z_p.spacings(mesh()), Phi), z_p.fixed_end());
}

IndexedVector QcfSolver::residual(const Spacings& r, const IndexedVector& Phi) const {
  IndexedVector res = psi_qcf(pot_, qce_.mesh(), r);
  for (int j = res.first(); j <= res.last(); ++j) res(j) += Phi(j);
  return res;
}

IterationTrace QcfSolver::solve_at_load(const Spacings& r0, const IndexedVector& Phi, StopRule stop,
                                        std::optional<ContractionWindow> window) const {
  IterationTrace tr;
  auto record = [&](const Spacings& r, int inner) {
    tr.states.push_back(r);
    tr.residuals.push_back(max_abs(residual(r, Phi)));
    tr.in_window.push_back(window ? window->contains(r) : false);
    tr.inner_iters.push_back(inner);
  };
  record(r0, 0);
  const int budget = std::min(stop.max_iters, opts_.max_outer);
  for (int p = 0;; ++p) {
    if (stop.tol && tr.residuals.back() <= *stop.tol) {
      tr.status = TraceStatus::converged;
      break;
    }
    if (p == budget) {
      tr.status = TraceStatus::max_iters;
      break;
    }
    const IndexedVector ghost = ghost_correction(pot_, qce_.mesh(), tr.states.back());
    IndexedVector rhs(r0.first(), r0.last());
    for (int j = rhs.first(); j <= rhs.last(); ++j) rhs(j) = -Phi(j) - ghost(j);
    std::vector<InnerStep> path;
    try {
      InnerResult res = inner_minimize(rhs, tr.states.back(), &path);
      record(res.r, res.iterations);
    } catch (const InnerFailure& e) {
      tr.status = e.fracture() ? TraceStatus::fracture : TraceStatus::inner_failure;
      tr.failure_state = Spacings(r0.first(), e.last_iterate());
      tr.failure_path = std::move(path);
      tr.failure_message = e.what();
      break;
    }
  }
  return tr;
}

FractureReport detect_fracture(const IterationTrace& trace, double threshold) {
  FractureReport rep;
  auto scan = [&](const Spacings& r) {
    for (int j = r.first(); j <= r.last(); ++j) {
      if (r(j) > threshold && r(j) > rep.spacing) {
        rep.fractured = true;
        rep.element = j;
        rep.spacing = r(j);
      }
    }
  };
  for (const auto& s : trace.states) scan(s);
  if (trace.failure_state) scan(*trace.failure_state);
  return rep;
}

double contraction_ratio(const QcfSolver& solver, const IndexedVector& Phi, const Spacings& r, const Spacings& s) {
  const Spacings tr = solver.outer_iterate(r, Phi);
  const Spacings ts = solver.outer_iterate(s, Phi);
  return max_abs_diff(tr, ts) / max_abs_diff(r, s);
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "p,residual_inf[force],in_window[bool],inner_iters[count]\n";
  for (std::size_t p = 0; p < trace.states.size(); ++p)
    os << p << ',' << format_double(trace.residuals[p]) << ',' << (trace.in_window[p] ? 1 : 0) << ','
       << trace.inner_iters[p] << '\n';
}

void write_trace_json(std::ostream& os, const IterationTrace& trace) {
  nlohmann::ordered_json j;
  j["status"] = to_string(trace.status);
  j["steps"] = trace.steps();
  j["final_residual"] = trace.residuals.back();
  j["final_state"] = {{"first", trace.final_state().first()}, {"r", trace.final_state().vector()}};
  if (trace.failure_state) {
    j["failure"] = {{"message", trace.failure_message},
                    {"state", trace.failure_state->vector()}};
    auto& path = j["failure"]["inner_path"] = nlohmann::ordered_json::array();
    for (const auto& s : trace.failure_path)
      path.push_back({{"iteration", s.iteration}, {"max_spacing", s.max_spacing}, {"element", s.element}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace qclab
