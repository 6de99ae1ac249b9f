#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "qclab/continuation.hpp"
#include "qclab/errors.hpp"

using namespace qclab;

namespace {

const PairPotential& lj() {
  static const PairPotential p = PairPotential::lennard_jones();
  return p;
}
const PotentialProfile& lj_profile() {
  static const PotentialProfile prof = compute_profile(lj());
  return prof;
}
const GrowthBounds& growth() {
  static const GrowthBounds g(lj(), lj_profile(), LoadPath{});
  return g;
}
const ContinuationProfile& qc_profile() {
  static const ContinuationProfile prof = ContinuationProfile::qc(growth(), 8.0 / 9);
  return prof;
}

double bisect_response(double phi) {
  double lo = lj_profile().a0, hi = lj_profile().r_star;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (uniform_stress(lj(), mid) < phi ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int count_to_reach(double alpha, double bracket, double eps) {
  int P = 1;
  while (std::pow(alpha, P) * bracket > eps) ++P;
  return P;
}

// Maximal steps with the given leading counts, then one iteration per step,
// then enough iterations at s = 1.
LoadPlan greedy_with_counts(const ContinuationProfile& prof, const std::vector<int>& lead, double eps) {
  LoadPlan plan{{0.0}, {0}, {prof.gamma0}};
  for (std::size_t q = 0;; ++q) {
    const double sp = plan.s.back(), gp = plan.gamma.back();
    const double reach = step_bracket(prof, sp, gp, 1.0);
    if (reach <= prof.delta(1.0)) {
      const int P = count_to_reach(prof.alpha, reach, eps);
      plan.s.push_back(1.0);
      plan.P.push_back(P);
      plan.gamma.push_back(std::pow(prof.alpha, P) * reach);
      return plan;
    }
    const int P = q < lead.size() ? lead[q] : 1;
    const double s = max_step(prof, sp, gp);
    REQUIRE(s > sp);
    plan.s.push_back(s);
    plan.P.push_back(P);
    plan.gamma.push_back(std::pow(prof.alpha, P) * step_bracket(prof, sp, gp, s));
  }
}

}  // namespace

TEST_CASE("uniform response solves the loading equation") {
  const LoadPath path;
  CHECK(uniform_response(lj(), lj_profile(), path, 0.0) == lj_profile().a0);
  const double r1 = uniform_response(lj(), lj_profile(), path, 1.0);
  CHECK(r1 == doctest::Approx(bisect_response(2.76)).epsilon(1e-13));
  CHECK(r1 < lj_profile().r_star);
  CHECK(uniform_stress(lj(), r1) == doctest::Approx(2.76).epsilon(1e-13));

  const double limit = lj_profile().phi_max / path.scale;
  CHECK(limit == doctest::Approx(1.0076).epsilon(1e-4));
  CHECK_THROWS_AS(uniform_response(lj(), lj_profile(), path, limit + 1e-4), NoSolution);
  CHECK_NOTHROW(uniform_response(lj(), lj_profile(), path, limit - 1e-4));

  const double rc = uniform_response(lj(), lj_profile(), path, -0.01);
  CHECK(rc < lj_profile().a0);
  CHECK(uniform_stress(lj(), rc) == doctest::Approx(-0.0276).epsilon(1e-10));

  double prev = 0.0;
  for (double s = 0.0; s <= 1.0; s += 1.0 / 64) {
    const double r = uniform_response(lj(), lj_profile(), path, s);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("contraction radius shrinks with load and closes at the terminal load") {
  const LoadPath path;
  for (double alpha : {1.0 / 8, 1.0 / 4, 1.0 / 2, 8.0 / 9}) {
    CAPTURE(alpha);
    const double s_star = terminal_load(lj(), lj_profile(), path, alpha);
    double prev = contraction_radius(lj(), lj_profile(), path, 0.0, alpha);
    for (int i = 1; i < 200; ++i) {
      const double s = s_star * i / 200.0;
      const double d = contraction_radius(lj(), lj_profile(), path, s, alpha);
      CHECK(d > 0.0);
      CHECK(d <= prev);
      prev = d;

      const ContractionWindow w = window_at(lj(), lj_profile(), path, s, alpha);
      CHECK(std::abs(contraction_constant(lj(), w.r_L, w.r_U) - alpha) <= 1e-10);
      CHECK(check_hypotheses(lj(), lj_profile(), w, IndexedVector(-7, 7, path(s))).certified());
    }
    CHECK_THROWS_AS(contraction_radius(lj(), lj_profile(), path, s_star + 1e-6, alpha), WindowExhausted);
  }
  CHECK(std::abs(terminal_load(lj(), lj_profile(), path, 8.0 / 9) - 1.001) <= 2e-3);
  // smaller alpha, earlier closing
  CHECK(terminal_load(lj(), lj_profile(), path, 1.0 / 8) < terminal_load(lj(), lj_profile(), path, 1.0 / 4));
}

TEST_CASE("growth bounds") {
  const GrowthBounds& g = growth();
  CHECK(g.kappa(0.0) == 0.0);
  CHECK(std::abs(g.kappa(1.0) - (g.r(1.0) - lj_profile().a0)) <= 1e-8);
  for (double s = 0.05; s <= 1.0; s += 0.05) CHECK(std::abs(g.kappa(s) - (g.r(s) - lj_profile().a0)) <= 1e-8);
  CHECK_THROWS_AS(g.kappa(1.5), DomainError);
  CHECK_THROWS_AS(g.kappa(-0.1), DomainError);

  double prev = 0.0;
  for (double s = 0.0; s <= 1.0; s += 1.0 / 32) {
    const double k = g.k(s);
    CHECK(k > prev);
    prev = k;
    const double h = 1e-6;
    CHECK(k == doctest::Approx((g.r(s + h) - g.r(s - h)) / (2 * h)).epsilon(1e-6));
  }

  double curv = 0.0;
  const double h = 1e-3;
  for (int i = 0; i <= 1000; ++i) {
    const double s = i * 1e-3;
    curv = std::max(curv, std::abs(g.r(s + h) - 2 * g.r(s) + g.r(s - h)) / (h * h));
  }
  CHECK(g.k2() >= curv / 2);
  CHECK(g.k2() <= 1.2 * curv / 2);
}

TEST_CASE("uniform planner formulas") {
  const UniformPlan u = plan_uniform({0.1, 1.0, 1.0, 0.5}, 0.04);
  CHECK(u.h_opt == doctest::Approx(0.06).epsilon(1e-14));
  CHECK(u.P == 2);
  CHECK(u.Q == 17);
  CHECK(u.work == 34);

  CHECK_THROWS_AS(plan_uniform({0.1, 1.0, 1.0, 0.5}, 0.1), PreconditionError);
  CHECK_THROWS_AS(plan_uniform({0.1, 1.0, 1.0, 0.5}, 0.0), PreconditionError);
  CHECK_THROWS_AS(plan_uniform({0.1, 1.0, 1.0, 1.5}, 0.01), PreconditionError);

  // small eps: the interpolation branch decides and P ~ ln eps / (2 ln alpha)
  for (double eps : {1e-6, 1e-8, 1e-10}) {
    const UniformPlan v = plan_uniform({0.1, 1.0, 1.0, 0.5}, eps);
    CHECK(v.h_opt == doctest::Approx(std::sqrt(eps)).epsilon(1e-14));
    CHECK(std::abs(v.P - std::log(eps) / (2 * std::log(0.5))) <= 1.0);
  }

  const ContinuationProfile prof = ContinuationProfile::constant(1.0, 0.1, 0.5);
  const LoadPlan plan = to_load_plan(u, prof);
  CHECK(plan.Q() == u.Q);
  CHECK(plan.s.back() == 1.0);
  CHECK(plan.work() == u.work);
  CHECK(is_admissible(plan, prof, 0.04).admissible);
}

TEST_CASE("constant profile endpoint plan follows the closed form") {
  const double k = 1.3, delta = 0.05, alpha = 0.5;
  const ContinuationProfile prof = ContinuationProfile::constant(k, delta, alpha);
  const LoadPlan plan = plan_endpoint(prof, 1e-9);
  REQUIRE(plan.Q() > 10);
  CHECK(std::abs(plan.s[1] - delta / k) <= 1e-10);
  for (int q = 2; q < plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    CHECK(std::abs((plan.s[u] - plan.s[u - 1]) - delta * (1 - alpha) / k) <= 1e-10);
    CHECK(plan.P[u] == 1);
    CHECK(std::abs(plan.gamma[u] - alpha * delta) <= 1e-12);
  }
  CHECK(plan.gamma.back() <= 1e-9);
  CHECK(plan.P.back() == count_to_reach(alpha, step_bracket(prof, plan.s[plan.s.size() - 2],
                                                            plan.gamma[plan.gamma.size() - 2], 1.0), 1e-9));
  CHECK(is_admissible(plan, prof, 1e-9).admissible);
  CHECK(plan.gamma == supersolution(plan.s, plan.P, prof));
}

TEST_CASE("final count is clamped to one iteration") {
  const ContinuationProfile prof = ContinuationProfile::constant(0.01, 0.05, 0.5);
  const LoadPlan plan = plan_endpoint(prof, 0.5);
  CHECK(plan.Q() == 1);
  CHECK(plan.P[1] == 1);
}

TEST_CASE("endpoint planner preconditions and stalls") {
  CHECK_THROWS_AS(plan_endpoint(ContinuationProfile::constant(1.0, 0.05, 0.5, 0.05), 1e-6), PreconditionError);
  CHECK_THROWS_AS(plan_endpoint(ContinuationProfile::constant(1.0, 0.05, 0.5), 0.0), PreconditionError);
  const ContinuationProfile half = ContinuationProfile::qc(growth(), 0.5);
  try {
    plan_endpoint(half, 1e-6);
    FAIL("expected StallError");
  } catch (const StallError& e) {
    CHECK(e.step() > 1);
  }
}

TEST_CASE("endpoint plan on the loading problem is admissible") {
  const ContinuationProfile& prof = qc_profile();
  const LoadPlan plan = plan_endpoint(prof, 1e-6);
  const Admissibility adm = is_admissible(plan, prof, 1e-6);
  CHECK(adm.admissible);
  CHECK(adm.q == -1);
  CHECK(plan.s.front() == 0.0);
  CHECK(plan.s.back() == 1.0);
  for (int q = 1; q < plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    CHECK(plan.P[u] == 1);
    CHECK(plan.s[u] > plan.s[u - 1]);
    const double bracket = step_bracket(prof, plan.s[u - 1], plan.gamma[u - 1], plan.s[u]);
    CHECK(bracket <= prof.delta(plan.s[u]));
    CHECK(bracket == doctest::Approx(prof.delta(plan.s[u])).epsilon(1e-9));
  }
  CHECK(plan.gamma == supersolution(plan.s, plan.P, prof));
}

TEST_CASE("supersolution recurrence") {
  const ContinuationProfile prof = ContinuationProfile::constant(0.7, 0.5, 0.8, 0.01);
  const std::vector<double> g = supersolution({0.0, 1.0}, {0, 5}, prof);
  CHECK(g[0] == 0.01);
  CHECK(g[1] == doctest::Approx(std::pow(0.8, 5) * (0.7 + 0.01)).epsilon(1e-15));
  CHECK(supersolution({0.0, 1.0}, {0, 400}, prof)[1] < 1e-30);
  const LoadPlan single = plan_single_step(prof, 5);
  CHECK(single.gamma == g);
}

TEST_CASE("admissibility reports the first violation") {
  const ContinuationProfile& prof = qc_profile();
  const LoadPlan plan = plan_endpoint(prof, 1e-6);
  LoadPlan pushed = plan;
  pushed.s[3] += 1e-3;
  const Admissibility adm = is_admissible(pushed, prof, 1e-6);
  CHECK_FALSE(adm.admissible);
  CHECK(adm.q == 3);

  LoadPlan unordered = plan;
  std::swap(unordered.s[4], unordered.s[5]);
  CHECK(is_admissible(unordered, prof, 1e-6).q == 5);

  LoadPlan idle = plan;
  idle.P[2] = 0;
  CHECK(is_admissible(idle, prof, 1e-6).q == 2);

  // the tolerance constraint is closed
  const ContinuationProfile c = ContinuationProfile::constant(0.2, 0.5, 0.5);
  const LoadPlan one = plan_single_step(c, 3);
  CHECK(is_admissible(one, c, one.gamma.back()).admissible);
  CHECK_FALSE(is_admissible(one, c, std::nextafter(one.gamma.back(), 0.0)).admissible);
  LoadPlan zero_final = plan_single_step(c, 0);
  CHECK(is_admissible(zero_final, c, 1.0).admissible);
}

TEST_CASE("maximize_steps fixes maximal plans and improves conservative ones") {
  const ContinuationProfile& prof = qc_profile();
  const LoadPlan plan = plan_endpoint(prof, 1e-6);
  const LoadPlan same = maximize_steps(plan, prof);
  CHECK(same.s == plan.s);
  CHECK(same.gamma == plan.gamma);

  // half-size first step, everything else greedy
  LoadPlan cons{{0.0}, {0}, {0.0}};
  cons.s.push_back(0.5 * plan.s[1]);
  cons.P.push_back(1);
  cons.gamma.push_back(prof.alpha * step_bracket(prof, 0.0, 0.0, cons.s[1]));
  for (;;) {
    const double sp = cons.s.back(), gp = cons.gamma.back();
    const double reach = step_bracket(prof, sp, gp, 1.0);
    if (reach <= prof.delta(1.0)) {
      const int P = count_to_reach(prof.alpha, reach, 1e-6);
      cons.s.push_back(1.0);
      cons.P.push_back(P);
      cons.gamma.push_back(std::pow(prof.alpha, P) * reach);
      break;
    }
    const double s = max_step(prof, sp, gp);
    cons.s.push_back(s);
    cons.P.push_back(1);
    cons.gamma.push_back(prof.alpha * step_bracket(prof, sp, gp, s));
  }
  REQUIRE(is_admissible(cons, prof, 1e-6).admissible);
  const LoadPlan better = maximize_steps(cons, prof);
  CHECK(better.P == cons.P);
  CHECK(better.gamma.back() < cons.gamma.back());
  CHECK(is_admissible(better, prof, 1e-6).admissible);
}

TEST_CASE("maximize_steps never increases the final supersolution") {
  const ContinuationProfile& prof = qc_profile();
  const double eps = 1e-6;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> frac(0.3, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    LoadPlan plan{{0.0}, {0}, {0.0}};
    for (;;) {
      const double sp = plan.s.back(), gp = plan.gamma.back();
      const double reach = step_bracket(prof, sp, gp, 1.0);
      if (reach <= prof.delta(1.0)) {
        const int P = count_to_reach(prof.alpha, reach, eps);
        plan.s.push_back(1.0);
        plan.P.push_back(P);
        plan.gamma.push_back(std::pow(prof.alpha, P) * reach);
        break;
      }
      const double s = sp + frac(rng) * (max_step(prof, sp, gp) - sp);
      const int P = count(rng);
      plan.s.push_back(s);
      plan.P.push_back(P);
      plan.gamma.push_back(std::pow(prof.alpha, P) * step_bracket(prof, sp, gp, s));
    }
    REQUIRE(is_admissible(plan, prof, eps).admissible);
    const LoadPlan out = maximize_steps(plan, prof);
    CHECK(out.work() == plan.work());
    CHECK(out.gamma.back() <= plan.gamma.back());
    CHECK(is_admissible(out, prof, eps).admissible);
  }
}

TEST_CASE("split_step keeps the work and lowers the final supersolution") {
  const ContinuationProfile& prof = qc_profile();
  const double eps = 1e-6;
  const LoadPlan plan = greedy_with_counts(prof, {1, 3, 2}, eps);
  REQUIRE(is_admissible(plan, prof, eps).admissible);
  const LoadPlan split = split_step(plan, 2, prof);
  CHECK(split.work() == plan.work());
  CHECK(split.Q() == plan.Q() + 1);
  CHECK(split.P[2] == 1);
  CHECK(split.P[3] == 2);
  CHECK(split.s[3] > plan.s[2]);
  CHECK(split.s[3] < plan.s[3]);
  // old step 3 is step 4 of the split plan
  CHECK(split.s[4] == plan.s[3]);
  CHECK(split.gamma[4] < plan.gamma[3]);
  CHECK(split.gamma.back() < plan.gamma.back());
  CHECK(is_admissible(split, prof, eps).admissible);

  CHECK_THROWS_AS(split_step(plan, 1, prof), RewriteInapplicable);  // P_1 = 1
  CHECK_THROWS_AS(split_step(plan, 0, prof), RewriteInapplicable);
  CHECK_THROWS_AS(split_step(plan, plan.Q() - 1, prof), RewriteInapplicable);
}

TEST_CASE("repeated splitting and maximizing recovers the greedy plan") {
  const ContinuationProfile& prof = qc_profile();
  const double eps = 1e-6;
  LoadPlan plan = greedy_with_counts(prof, {3}, eps);
  const long work = plan.work();
  for (int j = 1; j < plan.Q() - 1;) {
    if (plan.P[static_cast<std::size_t>(j)] > 1)
      plan = split_step(plan, j, prof);
    else
      ++j;
  }
  plan = maximize_steps(plan, prof);
  CHECK(plan.work() == work);
  for (int q = 1; q < plan.Q(); ++q) CHECK(plan.P[static_cast<std::size_t>(q)] == 1);

  const LoadPlan greedy = plan_endpoint(prof, eps);
  for (int q = 1; q < greedy.Q(); ++q) CHECK(plan.s[static_cast<std::size_t>(q)] == greedy.s[static_cast<std::size_t>(q)]);
  CHECK(plan.gamma.back() <= greedy.gamma.back());
}

TEST_CASE("no sampled equal-work alternative beats the greedy plan") {
  const ContinuationProfile& prof = qc_profile();
  const double eps = 1e-6;
  const LoadPlan greedy = plan_endpoint(prof, eps);
  const long work = greedy.work();
  for (int twos = 1; twos <= 6; ++twos) {
    // spend more iterations early; take what is left at s = 1
    LoadPlan alt = greedy_with_counts(prof, std::vector<int>(static_cast<std::size_t>(twos), 2), eps);
    const long spare = work - (alt.work() - alt.P.back());
    if (spare < 0) continue;
    alt.P.back() = static_cast<int>(spare);
    alt.gamma = supersolution(alt.s, alt.P, prof);
    CHECK(alt.work() == work);
    CHECK(alt.gamma.back() >= greedy.gamma.back());
  }
}

TEST_CASE("plan execution") {
  const QcfSolver solver(lj(), QcMesh::uniform(7, 3));
  const ContinuationProfile& prof = qc_profile();

  SUBCASE("endpoint plan converges and stays below the supersolution") {
    const LoadPlan plan = plan_endpoint(prof, 1e-6);
    const PlanRun run = run_plan(solver, growth(), plan, 8.0 / 9);
    REQUIRE(run.status == RunStatus::completed);
    CHECK(run.errors.size() == plan.s.size());
    for (std::size_t q = 0; q < run.errors.size(); ++q) CHECK(run.errors[q] <= plan.gamma[q]);
    CHECK(run.errors.back() <= 1e-6);
    CHECK(run.final_residual <= 1e-8);
    for (const auto& c : run.certificates) CHECK(c.certified());
    CHECK(run.certificates.size() == static_cast<std::size_t>(plan.Q()));
  }
  SUBCASE("small load needs no continuation") {
    const GrowthBounds g(lj(), lj_profile(), LoadPath{0.276});
    const ContinuationProfile small = ContinuationProfile::qc(g, 8.0 / 9);
    const LoadPlan plan = plan_single_step(small, 60);
    const PlanRun run = run_plan(solver, g, plan, 8.0 / 9);
    CHECK(run.status == RunStatus::completed);
    CHECK(run.errors.back() <= 1e-10);
  }
  SUBCASE("full load in one step fractures") {
    const PlanRun run = run_plan(solver, growth(), plan_single_step(prof, 50), 8.0 / 9);
    CHECK(run.status == RunStatus::fracture);
    CHECK(run.failed_step == 1);
    CHECK(run.states.size() == 1);
  }
  SUBCASE("uniform plan keeps the interpolated path within twice the tolerance") {
    const double alpha = 0.95, eps = 1e-3;
    const ContinuationProfile up = ContinuationProfile::qc(growth(), alpha);
    const LoadPlan plan = to_load_plan(plan_uniform(uniform_constants(growth(), alpha), eps), up);
    REQUIRE(is_admissible(plan, up, eps).admissible);
    const PlanRun run = run_plan(solver, growth(), plan, alpha);
    REQUIRE(run.status == RunStatus::completed);
    CHECK(interpolant_path_error(growth(), plan, run) <= 2 * eps);
  }
  SUBCASE("a plan beyond the window is refused") {
    const LoadPlan plan{{0.0, 1.0}, {0, 5}, {0.0, 0.0}};
    const PlanRun run = run_plan(solver, growth(), plan, 0.5);
    CHECK(run.status == RunStatus::hypothesis_violation);
    CHECK(run.failed_step == 1);
  }
}

TEST_CASE("plan and band tables") {
  const ContinuationProfile& prof = qc_profile();
  const LoadPlan plan = plan_endpoint(prof, 1e-6);
  std::ostringstream os;
  write_plan_csv(os, plan);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "q,s_q[-],P_q[count],gamma_q[length]");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == plan.Q() + 1);

  auto read_band = [](double alpha) {
    std::ostringstream b;
    write_band_csv(b, growth(), alpha);
    std::istringstream bin(b.str());
    std::string row;
    std::getline(bin, row);
    std::vector<std::array<double, 4>> out;
    while (std::getline(bin, row)) {
      std::array<double, 4> v{};
      std::istringstream fields(row);
      std::string f;
      for (double& x : v) {
        std::getline(fields, f, ',');
        x = std::stod(f);
      }
      out.push_back(v);
    }
    return out;
  };
  const auto b18 = read_band(1.0 / 8), b14 = read_band(1.0 / 4), b12 = read_band(1.0 / 2), b89 = read_band(8.0 / 9);
  CHECK(b89.back()[0] > 1.0);
  CHECK(std::abs(b89.back()[0] - 1.001) <= 2e-3);
  for (std::size_t i = 1; i < b89.size(); ++i) CHECK(b89[i][1] > b89[i - 1][1]);
  // nested: at a common s the smaller alpha gives the narrower band
  for (std::size_t i = 0; i + 1 < b18.size(); ++i) {
    CHECK(b18[i][0] == b14[i][0]);
    CHECK(b18[i][3] - b18[i][2] < b14[i][3] - b14[i][2]);
    CHECK(b14[i][3] - b14[i][2] < b12[i][3] - b12[i][2]);
    CHECK(b12[i][3] - b12[i][2] < b89[i][3] - b89[i][2]);
  }
}
