#include "qclab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qclab/continuation.hpp"
#include "qclab/errors.hpp"
#include "qclab/format.hpp"
#include "qclab/solver.hpp"

namespace qclab {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

fs::path prepare_out(const ExperimentConfig& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

Json report_header(const ExperimentConfig& c, const char* command) {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash(c);
  j["config"] = to_text(c);
  return j;
}

void write_json(const fs::path& p, const Json& j) { open_out(p) << j.dump(2) << '\n'; }

Json profile_json(const PotentialProfile& prof) {
  return {{"a0", prof.a0},           {"r_tilde_1", prof.r_tilde_1}, {"r_tilde_2", prof.r_tilde_2},
          {"D_tilde", prof.D_tilde}, {"phi_max", prof.phi_max},     {"r_star", prof.r_star}};
}

Json plan_json(const LoadPlan& plan) {
  Json steps = Json::array();
  for (int q = 0; q <= plan.Q(); ++q) {
    const auto u = static_cast<std::size_t>(q);
    steps.push_back({{"q", q}, {"s", plan.s[u]}, {"P", plan.P[u]}, {"gamma", plan.gamma[u]}});
  }
  return {{"Q", plan.Q()}, {"work", plan.work()}, {"gamma_Q", plan.gamma.back()}, {"steps", steps}};
}

// Runs body, mapping configuration and planning errors to exit codes.
template <class Body>
int guarded(const ExperimentConfig& c, std::ostream& log, Body body) {
  try {
    validate(c);
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const StallError& e) {
    log << "stall at step " << e.step() << ": " << e.what() << '\n';
    return exit_code::violation;
  } catch (const PreconditionError& e) {
    log << "precondition violated: " << e.what() << '\n';
    return exit_code::violation;
  } catch (const HypothesisViolation& e) {
    log << "hypothesis violated: " << e.what() << '\n';
    return exit_code::violation;
  }
}

struct Planned {
  LoadPlan plan;
  Json meta;
};

Planned make_plan(const ExperimentConfig& c, const GrowthBounds& g, const ContinuationProfile& cp) {
  Planned out;
  out.meta["planner"] = to_string(c.planner);
  out.meta["alpha"] = c.alpha;
  out.meta["epsilon"] = c.epsilon;
  out.meta["gamma0"] = cp.gamma0;
  switch (c.planner) {
    case Planner::endpoint:
      out.plan = plan_endpoint(cp, c.epsilon);
      break;
    case Planner::uniform: {
      const UniformConstants uc = uniform_constants(g, c.alpha);
      const UniformPlan u = plan_uniform(uc, c.epsilon);
      out.meta["uniform"] = {{"delta", uc.delta}, {"k", uc.k},         {"k2", uc.k2},
                             {"h_opt", u.h_opt},  {"P", u.P},          {"Q", u.Q},
                             {"work", u.work}};
      out.plan = to_load_plan(u, cp);
      break;
    }
    case Planner::single_step: {
      const double reach = g.kappa(1.0) + cp.gamma0;
      const int P = std::max(1, static_cast<int>(std::ceil(std::log(c.epsilon / reach) / std::log(c.alpha))));
      out.plan = plan_single_step(cp, P);
      break;
    }
  }
  const Admissibility adm = is_admissible(out.plan, cp, c.epsilon);
  out.meta["admissible"] = adm.admissible;
  if (!adm.admissible) out.meta["violation"] = {{"q", adm.q}, {"reason", adm.reason}};
  return out;
}

}  // namespace

int cmd_profile(const ExperimentConfig& c, std::ostream& log) {
  return guarded(c, log, [&] {
    const fs::path dir = prepare_out(c);
    const PairPotential p = make_potential(c);
    const PotentialProfile prof = compute_profile(p);
    const AssumptionReport rep = verify_assumptions(p, prof);

    log << "a0        " << format_double(prof.a0) << '\n'
        << "r_tilde_1 " << format_double(prof.r_tilde_1) << '\n'
        << "r_tilde_2 " << format_double(prof.r_tilde_2) << '\n'
        << "D_tilde   " << format_double(prof.D_tilde) << '\n'
        << "phi_max   " << format_double(prof.phi_max) << '\n'
        << "r_star    " << format_double(prof.r_star) << '\n';
    Json checks = Json::array();
    for (const auto& chk : rep.checks) {
      log << (chk.passed ? "pass " : "FAIL ") << chk.name << (chk.detail.empty() ? "" : "  " + chk.detail) << '\n';
      checks.push_back({{"name", chk.name}, {"passed", chk.passed}, {"detail", chk.detail}});
    }

    Json j = report_header(c, "profile");
    j["profile"] = profile_json(prof);
    j["assumptions"] = checks;
    j["all_passed"] = rep.all_passed();
    write_json(dir / "report.json", j);
    return rep.all_passed() ? exit_code::ok : exit_code::violation;
  });
}

int cmd_bands(const ExperimentConfig& c, std::ostream& log) {
  return guarded(c, log, [&] {
    const fs::path dir = prepare_out(c);
    const PairPotential p = make_potential(c);
    const PotentialProfile prof = compute_profile(p);
    const GrowthBounds g(p, prof, LoadPath{c.scale});

    struct Band {
      int n, d;
    };
    Json bands = Json::array();
    for (Band b : {Band{1, 8}, Band{1, 4}, Band{1, 2}, Band{8, 9}}) {
      const double alpha = static_cast<double>(b.n) / b.d;
      const std::string name = "bands_alpha_" + std::to_string(b.n) + "_" + std::to_string(b.d) + ".csv";
      auto os = open_out(dir / name);
      write_band_csv(os, g, alpha);
      const double s_star = terminal_load(p, prof, g.path(), alpha);
      log << name << "  window closes at s = " << format_double(s_star) << '\n';
      bands.push_back({{"alpha", alpha}, {"file", name}, {"terminal_s", s_star}});
    }
    Json j = report_header(c, "bands");
    j["profile"] = profile_json(prof);
    j["bands"] = bands;
    write_json(dir / "report.json", j);
    return exit_code::ok;
  });
}

int cmd_fracture(const ExperimentConfig& c, std::ostream& log) {
  return guarded(c, log, [&] {
    const fs::path dir = prepare_out(c);
    const QcfSolver solver(make_potential(c), make_mesh(c));
    const QcMesh& m = solver.mesh();
    const IndexedVector load(-m.N(), m.N(), c.scale);
    const Spacings start = uniform_spacings(m, solver.profile().a0);
    const IterationTrace tr = solver.solve_at_load(start, load, {solver.options().max_outer, 1e-10});
    const FractureReport fr = detect_fracture(tr, solver.fracture_threshold());

    {
      auto os = open_out(dir / "trace_q1.csv");
      write_trace_csv(os, tr);
    }
    {
      auto os = open_out(dir / "fracture_path.csv");
      os << "iteration[count],max_spacing[length],element[index]\n";
      for (const auto& st : tr.failure_path)
        os << st.iteration << ',' << format_double(st.max_spacing) << ',' << st.element << '\n';
    }
    std::ostringstream trace_json;
    write_trace_json(trace_json, tr);

    const bool interface = fr.fractured && ((fr.element >= -m.K() - 1 && fr.element <= -m.K() + 1) ||
                                            (fr.element >= m.K() - 1 && fr.element <= m.K() + 1));
    Json j = report_header(c, "fracture");
    j["status"] = to_string(tr.status);
    j["fractured"] = fr.fractured;
    if (fr.fractured) {
      j["element"] = fr.element;
      j["spacing"] = fr.spacing;
      j["interface_element"] = interface;
    }
    j["threshold"] = solver.fracture_threshold();
    j["trace"] = Json::parse(trace_json.str());
    write_json(dir / "report.json", j);

    if (fr.fractured) {
      log << "fracture at element " << fr.element << " (spacing " << format_double(fr.spacing) << ")"
          << (interface ? ", at the atomistic/continuum interface" : "") << '\n';
      return exit_code::ok;
    }
    log << "no fracture: status " << to_string(tr.status) << ", residual " << format_double(tr.residuals.back())
        << '\n';
    return exit_code::no_fracture;
  });
}

int cmd_plan(const ExperimentConfig& c, std::ostream& log) {
  return guarded(c, log, [&] {
    const fs::path dir = prepare_out(c);
    const PairPotential p = make_potential(c);
    const GrowthBounds g(p, compute_profile(p), LoadPath{c.scale});
    const ContinuationProfile cp = ContinuationProfile::qc(g, c.alpha);
    const Planned pl = make_plan(c, g, cp);
    {
      auto os = open_out(dir / "plan.csv");
      write_plan_csv(os, pl.plan);
    }
    Json j = report_header(c, "plan");
    j["meta"] = pl.meta;
    j["plan"] = plan_json(pl.plan);
    write_json(dir / "plan.json", j);
    log << to_string(c.planner) << " plan: Q = " << pl.plan.Q() << ", work = " << pl.plan.work()
        << ", gamma_Q = " << format_double(pl.plan.gamma.back())
        << (pl.meta["admissible"].get<bool>() ? "" : " (not admissible)") << '\n';
    return pl.meta["admissible"].get<bool>() ? exit_code::ok : exit_code::violation;
  });
}

int cmd_continue(const ExperimentConfig& c, std::ostream& log) {
  return guarded(c, log, [&] {
    const fs::path dir = prepare_out(c);
    const QcfSolver solver(make_potential(c), make_mesh(c));
    const GrowthBounds g(solver.potential(), solver.profile(), LoadPath{c.scale});
    const ContinuationProfile cp = ContinuationProfile::qc(g, c.alpha);
    const Planned pl = make_plan(c, g, cp);
    const LoadPlan& plan = pl.plan;
    {
      auto os = open_out(dir / "plan.csv");
      write_plan_csv(os, plan);
    }
    Json pj = report_header(c, "continue");
    pj["meta"] = pl.meta;
    pj["plan"] = plan_json(plan);
    write_json(dir / "plan.json", pj);

    const bool admissible = pl.meta["admissible"].get<bool>();
    if (!admissible && c.planner != Planner::single_step) {
      log << "plan is not admissible: " << pl.meta["violation"]["reason"].get<std::string>() << '\n';
      return exit_code::violation;
    }

    const PlanRun run = run_plan(solver, g, plan, c.alpha);
    for (std::size_t q = 0; q < run.traces.size(); ++q) {
      auto os = open_out(dir / ("trace_q" + std::to_string(q + 1) + ".csv"));
      write_trace_csv(os, run.traces[q]);
    }
    {
      auto os = open_out(dir / "staircase.csv");
      write_staircase_csv(os, plan, run, cp);
    }

    bool dominated = true;
    Json steps = Json::array();
    for (std::size_t q = 0; q < run.errors.size(); ++q) {
      dominated = dominated && run.errors[q] <= plan.gamma[q];
      steps.push_back({{"q", q}, {"s", plan.s[q]}, {"gamma", plan.gamma[q]}, {"e", run.errors[q]}});
    }
    Json j = report_header(c, "continue");
    j["status"] = to_string(run.status);
    j["work"] = plan.work();
    j["Q"] = plan.Q();
    j["admissible"] = admissible;
    if (run.failed_step >= 0) {
      j["failed_step"] = run.failed_step;
      j["message"] = run.message;
    }
    j["final_error"] = run.errors.back();
    j["final_residual"] = run.final_residual;
    j["supersolution_dominates"] = dominated;
    if (run.status == RunStatus::completed && c.planner == Planner::uniform)
      j["interpolant_path_error"] = interpolant_path_error(g, plan, run);
    j["steps"] = steps;
    write_json(dir / "report.json", j);

    switch (run.status) {
      case RunStatus::completed:
        log << "completed: Q = " << plan.Q() << ", work = " << plan.work() << ", final error "
            << format_double(run.errors.back()) << ", residual " << format_double(run.final_residual) << '\n';
        return exit_code::ok;
      case RunStatus::hypothesis_violation:
        log << "step " << run.failed_step << ": " << run.message << '\n';
        return exit_code::violation;
      case RunStatus::fracture:
      case RunStatus::inner_failure:
        log << "step " << run.failed_step << " failed (" << to_string(run.status) << "): " << run.message << '\n';
        return exit_code::fracture;
    }
    return exit_code::fracture;
  });
}

}  // namespace qclab
