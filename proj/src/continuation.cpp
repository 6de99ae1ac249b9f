#include "qclab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "qclab/errors.hpp"
#include "qclab/format.hpp"
#include "qclab/roots.hpp"

namespace qclab {

double uniform_response(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s) {
  const double load = path(s);
  if (load == 0.0) return prof.a0;
  if (!(load < prof.phi_max)) {
    std::ostringstream msg;
    msg << "load " << load << " at s=" << s << " is not below the load limit " << prof.phi_max;
    throw NoSolution(msg.str());
  }
  auto f = [&](double r) { return uniform_stress(p, r) - load; };
  auto df = [&](double r) { return uniform_stiffness(p, r); };
  if (load > 0.0) return find_root(f, df, prof.a0, prof.r_star);
  double lo = prof.a0;
  do {
    lo *= 0.95;
  } while (f(lo) > 0.0);
  return find_root(f, df, lo, prof.a0);
}

double terminal_load(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double alpha) {
  const double c = 5.0 + 16.0 / alpha;
  auto h = [&](double r) { return p(r, 2) + c * p(2.0 * r, 2); };
  auto dh = [&](double r) { return p(r, 3) + 2.0 * c * p(2.0 * r, 3); };
  const double r = find_root(h, dh, prof.a0, prof.r_star);
  return uniform_stress(p, r) / path.scale;
}

double contraction_radius(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s,
                          double alpha) {
  const double r = uniform_response(p, prof, path, s);
  const double c = 5.0 + 16.0 / alpha;
  auto g = [&](double d) { return p(r + d, 2) + c * p(2.0 * (r - d), 2); };
  auto dg = [&](double d) { return p(r + d, 3) - 2.0 * c * p(2.0 * (r - d), 3); };
  const double hi = r - 0.5 * prof.r_tilde_2;
  if (!(hi > 0.0) || !(g(0.0) > 0.0) || !(g(hi) < 0.0)) {
    std::ostringstream msg;
    msg << "no contraction window for alpha=" << alpha << " at s=" << s;
    throw WindowExhausted(msg.str());
  }
  return find_root(g, dg, 0.0, hi);
}

ContractionWindow window_at(const PairPotential& p, const PotentialProfile& prof, const LoadPath& path, double s,
                            double alpha) {
  const double r = uniform_response(p, prof, path, s);
  const double d = contraction_radius(p, prof, path, s, alpha);
  return {r - d, r + d, alpha};
}

GrowthBounds::GrowthBounds(PairPotential p, PotentialProfile prof, LoadPath path, double s_max)
    : pot_(std::move(p)), prof_(prof), path_(path), s_max_(s_max) {
  const double h = s_max_ / kPanels;
  kappa_nodes_.assign(kPanels + 1, 0.0);
  k_nodes_.resize(kPanels + 1);
  for (int i = 0; i <= kPanels; ++i) k_nodes_[static_cast<std::size_t>(i)] = k(i * h);
  for (int i = 0; i < kPanels; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double mid = k((i + 0.5) * h);
    kappa_nodes_[u + 1] = kappa_nodes_[u] + h / 6.0 * (k_nodes_[u] + 4.0 * mid + k_nodes_[u + 1]);
  }

  const double dh = s_max_ / kCurvatureGrid;
  double curv = 0.0;
  for (int i = 0; i <= kCurvatureGrid; ++i) {
    const double s = i * dh;
    curv = std::max(curv, std::abs(r(s + dh) - 2.0 * r(s) + r(s - dh)) / (dh * dh));
  }
  k2_ = 1.1 * curv / 2.0;
}

double GrowthBounds::k(double s) const {
  const double stiff = uniform_stiffness(pot_, r(s));
  if (!(stiff > 0.0)) throw DomainError("rate bound undefined at the load limit");
  return path_.scale / stiff;
}

double GrowthBounds::kappa(double s) const {
  if (s < 0.0 || s > s_max_) {
    std::ostringstream msg;
    msg << "kappa is tabulated on [0, " << s_max_ << "], got s=" << s;
    throw DomainError(msg.str());
  }
  const double h = s_max_ / kPanels;
  const int i = std::min(static_cast<int>(s / h), kPanels - 1);
  const auto u = static_cast<std::size_t>(i);
  const double t = (s - i * h) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * kappa_nodes_[u] + (t3 - 2 * t2 + t) * h * k_nodes_[u] +
         (-2 * t3 + 3 * t2) * kappa_nodes_[u + 1] + (t3 - t2) * h * k_nodes_[u + 1];
}

ContinuationProfile ContinuationProfile::constant(double k, double delta, double alpha, double gamma0) {
  ContinuationProfile prof;
  prof.kappa = [k](double s) { return k * s; };
  prof.delta = [delta](double) { return delta; };
  prof.alpha = alpha;
  prof.gamma0 = gamma0;
  return prof;
}

ContinuationProfile ContinuationProfile::qc(const GrowthBounds& g, double alpha, double gamma0) {
  auto shared = std::make_shared<const GrowthBounds>(g);
  const double s_star = terminal_load(g.potential(), g.profile(), g.path(), alpha);
  ContinuationProfile prof;
  prof.kappa = [shared](double s) { return shared->kappa(s); };
  prof.delta = [shared, s_star, alpha](double s) {
    if (s >= s_star) return 0.0;
    try {
      return contraction_radius(shared->potential(), shared->profile(), shared->path(), s, alpha);
    } catch (const WindowExhausted&) {
      return 0.0;
    }
  };
  prof.alpha = alpha;
  prof.gamma0 = gamma0;
  return prof;
}

long LoadPlan::work() const {
  long w = 0;
  for (int p : P) w += p;
  return w;
}

double step_bracket(const ContinuationProfile& prof, double s_prev, double gamma_prev, double s) {
  return prof.kappa(s) - prof.kappa(s_prev) + gamma_prev;
}

std::vector<double> supersolution(const std::vector<double>& s, const std::vector<int>& P,
                                  const ContinuationProfile& prof) {
  std::vector<double> gamma{prof.gamma0};
  for (std::size_t q = 1; q < s.size(); ++q)
    gamma.push_back(std::pow(prof.alpha, P[q]) * step_bracket(prof, s[q - 1], gamma[q - 1], s[q]));
  return gamma;
}

UniformConstants uniform_constants(const GrowthBounds& g, double alpha) {
  UniformConstants c;
  // delta decreases and k increases with s, so both extremes sit at s = 1
  c.delta = contraction_radius(g.potential(), g.profile(), g.path(), 1.0, alpha);
  c.k = g.k(1.0);
  c.k2 = g.k2();
  c.alpha = alpha;
  return c;
}

UniformPlan plan_uniform(const UniformConstants& c, double eps) {
  if (!(eps > 0.0 && eps < c.delta)) {
    std::ostringstream msg;
    msg << "uniform planner needs 0 < eps < delta (eps=" << eps << ", delta=" << c.delta << ")";
    throw PreconditionError(msg.str());
  }
  if (!(c.k > 0.0 && c.k2 > 0.0 && c.alpha > 0.0 && c.alpha < 1.0))
    throw PreconditionError("uniform planner needs k > 0, k2 > 0 and 0 < alpha < 1");
  UniformPlan u;
  u.h_opt = std::min((c.delta - eps) / c.k, std::sqrt(eps / c.k2));
  u.P = std::max(1, static_cast<int>(std::ceil(std::log(eps / (eps + c.k * u.h_opt)) / std::log(c.alpha))));
  u.Q = std::max(1, static_cast<int>(std::ceil(1.0 / u.h_opt)));
  u.work = static_cast<long>(u.Q) * u.P;
  return u;
}

LoadPlan to_load_plan(const UniformPlan& u, const ContinuationProfile& prof) {
  LoadPlan plan;
  plan.s.push_back(0.0);
  plan.P.push_back(0);
  for (int q = 1; q <= u.Q; ++q) {
    plan.s.push_back(q == u.Q ? 1.0 : std::min(1.0, q * u.h_opt));
    plan.P.push_back(u.P);
  }
  plan.gamma = supersolution(plan.s, plan.P, prof);
  return plan;
}

double max_step(const ContinuationProfile& prof, double s_prev, double gamma_prev) {
  auto excess = [&](double s) { return step_bracket(prof, s_prev, gamma_prev, s) - prof.delta(s); };
  if (excess(s_prev) > 0.0) return s_prev;
  return last_feasible(excess, s_prev, 1.0);
}

namespace {

int final_count(double alpha, double bracket, double eps) {
  if (!(bracket > eps)) return 1;
  int P = std::max(1, static_cast<int>(std::ceil((std::log(eps) - std::log(bracket)) / std::log(alpha))));
  while (std::pow(alpha, P) * bracket > eps) ++P;
  return P;
}

}  // namespace

LoadPlan plan_endpoint(const ContinuationProfile& prof, double eps, int max_steps) {
  if (!(eps > 0.0)) throw PreconditionError("endpoint planner needs eps > 0");
  if (!(prof.gamma0 < prof.delta(0.0))) throw PreconditionError("endpoint planner needs gamma0 < delta(0)");

  LoadPlan plan{{0.0}, {0}, {prof.gamma0}};
  for (int q = 1;; ++q) {
    const double sp = plan.s.back();
    const double gp = plan.gamma.back();
    const double reach = step_bracket(prof, sp, gp, 1.0);
    if (reach <= prof.delta(1.0)) {
      const int P = final_count(prof.alpha, reach, eps);
      plan.s.push_back(1.0);
      plan.P.push_back(P);
      plan.gamma.push_back(std::pow(prof.alpha, P) * reach);
      return plan;
    }
    if (q > max_steps) throw StallError("endpoint planner exceeded its step budget before s = 1", q);
    const double sn = max_step(prof, sp, gp);
    if (!(sn > sp)) {
      std::ostringstream msg;
      msg << "no positive load step from s=" << sp << ": the contraction window closes before s = 1";
      throw StallError(msg.str(), q);
    }
    plan.s.push_back(sn);
    plan.P.push_back(1);
    plan.gamma.push_back(prof.alpha * step_bracket(prof, sp, gp, sn));
  }
}

LoadPlan plan_single_step(const ContinuationProfile& prof, int P) {
  LoadPlan plan{{0.0, 1.0}, {0, P}, {}};
  plan.gamma = supersolution(plan.s, plan.P, prof);
  return plan;
}

Admissibility is_admissible(const LoadPlan& plan, const ContinuationProfile& prof, double eps) {
  auto reject = [](int q, std::string why) { return Admissibility{false, q, std::move(why)}; };
  const int Q = plan.Q();
  if (Q < 1 || plan.P.size() != plan.s.size()) return reject(0, "plan needs at least one step and one count per step");
  if (plan.s.front() != 0.0) return reject(0, "s_0 must be 0");
  if (plan.s.back() != 1.0) return reject(Q, "s_Q must be 1");
  for (int q = 1; q <= Q; ++q) {
    const auto u = static_cast<std::size_t>(q);
    if (plan.s[u] < plan.s[u - 1]) return reject(q, "load steps must be nondecreasing");
    if (q < Q && plan.P[u] < 1) return reject(q, "intermediate steps need at least one iteration");
    if (plan.P[u] < 0) return reject(q, "iteration counts must be nonnegative");
  }
  const std::vector<double> gamma = supersolution(plan.s, plan.P, prof);
  for (int q = 1; q <= Q; ++q) {
    const auto u = static_cast<std::size_t>(q);
    const double bracket = step_bracket(prof, plan.s[u - 1], gamma[u - 1], plan.s[u]);
    const double delta = prof.delta(plan.s[u]);
    if (!(bracket <= delta)) {
      std::ostringstream msg;
      msg << "window constraint fails: " << bracket << " > delta(" << plan.s[u] << ") = " << delta;
      return reject(q, msg.str());
    }
  }
  if (!(gamma.back() <= eps)) {
    std::ostringstream msg;
    msg << "final supersolution " << gamma.back() << " exceeds eps " << eps;
    return reject(Q, msg.str());
  }
  return {};
}

LoadPlan maximize_steps(const LoadPlan& plan, const ContinuationProfile& prof) {
  LoadPlan out{{0.0}, {0}, {prof.gamma0}};
  const int Q = plan.Q();
  for (int q = 1; q <= Q; ++q) {
    const auto u = static_cast<std::size_t>(q);
    const double sp = out.s.back();
    const double gp = out.gamma.back();
    const double s = q == Q ? 1.0 : max_step(prof, sp, gp);
    out.s.push_back(s);
    out.P.push_back(plan.P[u]);
    out.gamma.push_back(std::pow(prof.alpha, plan.P[u]) * step_bracket(prof, sp, gp, s));
  }
  return out;
}

LoadPlan split_step(const LoadPlan& plan, int j, const ContinuationProfile& prof) {
  const int Q = plan.Q();
  if (j < 1 || j >= Q - 1) throw RewriteInapplicable("split_step needs 1 <= j < Q-1");
  const auto u = static_cast<std::size_t>(j);
  if (plan.P[u] <= 1) throw RewriteInapplicable("split_step needs P_j > 1");

  const std::vector<double> gamma = supersolution(plan.s, plan.P, prof);
  const double carried = prof.alpha * step_bracket(prof, plan.s[u - 1], gamma[u - 1], plan.s[u]);
  const double sj = plan.s[u];
  const double sn = plan.s[u + 1];
  auto excess = [&](double s) { return step_bracket(prof, sj, carried, s) - prof.delta(s); };
  if (!(excess(sj) < 0.0) || !(excess(sn) > 0.0)) {
    std::ostringstream msg;
    msg << "no split point for step " << j << " inside (" << sj << ", " << sn << ")";
    throw RewriteInapplicable(msg.str());
  }
  const double s_new = last_feasible(excess, sj, sn);

  LoadPlan out = plan;
  out.P[u] = 1;
  out.s.insert(out.s.begin() + j + 1, s_new);
  out.P.insert(out.P.begin() + j + 1, plan.P[u] - 1);
  out.gamma = supersolution(out.s, out.P, prof);
  return out;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::fracture: return "fracture";
    case RunStatus::inner_failure: return "inner-failure";
    case RunStatus::hypothesis_violation: return "hypothesis-violation";
  }
  return "unknown";
}

PlanRun run_plan(const QcfSolver& solver, const GrowthBounds& g, const LoadPlan& plan, double alpha,
                 RunOptions opts) {
  const QcMesh& m = solver.mesh();
  PlanRun run;
  Spacings r = uniform_spacings(m, g.r(0.0));
  run.states.push_back(r);
  run.errors.push_back(0.0);
  IndexedVector load(-m.N(), m.N(), 0.0);
  for (int q = 1; q <= plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    const double s = plan.s[u];
    load = IndexedVector(-m.N(), m.N(), g.path()(s));

    std::optional<ContractionWindow> window;
    try {
      window = window_at(g.potential(), g.profile(), g.path(), s, alpha);
    } catch (const WindowExhausted& e) {
      if (opts.certify) {
        run.status = RunStatus::hypothesis_violation;
        run.failed_step = q;
        run.message = e.what();
        break;
      }
    }
    if (opts.certify) {
      run.certificates.push_back(check_hypotheses(g.potential(), g.profile(), *window, load));
      if (!run.certificates.back().certified()) {
        run.status = RunStatus::hypothesis_violation;
        run.failed_step = q;
        run.message = "window hypotheses fail: " + run.certificates.back().violations.front().hypothesis;
        break;
      }
    }

    run.traces.push_back(solver.solve_at_load(r, load, {plan.P[u], std::nullopt}, window));
    const IterationTrace& tr = run.traces.back();
    if (tr.status == TraceStatus::fracture || tr.status == TraceStatus::inner_failure) {
      run.status = tr.status == TraceStatus::fracture ? RunStatus::fracture : RunStatus::inner_failure;
      run.failed_step = q;
      run.message = tr.failure_message;
      break;
    }
    r = tr.final_state();
    run.states.push_back(r);
    run.errors.push_back(max_abs_diff(r, uniform_spacings(m, g.r(s))));
  }
  run.final_residual = max_abs(solver.residual(run.states.back(), load));
  return run;
}

double interpolant_path_error(const GrowthBounds& g, const LoadPlan& plan, const PlanRun& run, int per_step) {
  if (run.status != RunStatus::completed) throw PreconditionError("path error needs a completed run");
  double worst = 0.0;
  for (int q = 1; q <= plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    const Spacings& a = run.states[u - 1];
    const Spacings& b = run.states[u];
    for (int i = 0; i <= per_step; ++i) {
      const double t = static_cast<double>(i) / per_step;
      const double s = plan.s[u - 1] + t * (plan.s[u] - plan.s[u - 1]);
      const double ref = g.r(s);
      for (int j = a.first(); j <= a.last(); ++j)
        worst = std::max(worst, std::abs((1.0 - t) * a(j) + t * b(j) - ref));
    }
  }
  return worst;
}

void write_plan_csv(std::ostream& os, const LoadPlan& plan) {
  os << "q,s_q[-],P_q[count],gamma_q[length]\n";
  for (int q = 0; q <= plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    os << q << ',' << format_double(plan.s[u]) << ',' << plan.P[u] << ',' << format_double(plan.gamma[u]) << '\n';
  }
}

void write_band_csv(std::ostream& os, const GrowthBounds& g, double alpha, int points) {
  const PairPotential& p = g.potential();
  const PotentialProfile& prof = g.profile();
  const double s_star = terminal_load(p, prof, g.path(), alpha);
  const double s_end = (1.0 - 1e-9) * prof.phi_max / g.path().scale;
  os << "s[-],r[length],r_minus_delta[length],r_plus_delta[length]\n";
  for (int i = 0; i < points; ++i) {
    const double s = s_end * i / (points - 1);
    if (s >= s_star) break;
    double d = 0.0;
    try {
      d = contraction_radius(p, prof, g.path(), s, alpha);
    } catch (const WindowExhausted&) {
      break;
    }
    const double r = g.r(s);
    os << format_double(s) << ',' << format_double(r) << ',' << format_double(r - d) << ',' << format_double(r + d)
       << '\n';
  }
  const double r_star = g.r(s_star);
  os << format_double(s_star) << ',' << format_double(r_star) << ',' << format_double(r_star) << ','
     << format_double(r_star) << '\n';
}

void write_staircase_csv(std::ostream& os, const LoadPlan& plan, const PlanRun& run, const ContinuationProfile& prof) {
  os << "q,s_q[-],e_q[length],delta[length],gamma_q[length]\n";
  for (std::size_t q = 0; q < run.errors.size(); ++q)
    os << q << ',' << format_double(plan.s[q]) << ',' << format_double(run.errors[q]) << ','
       << format_double(prof.delta(plan.s[q])) << ',' << format_double(plan.gamma[q]) << '\n';
}

}  // namespace qclab
