#include "qclab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qclab/errors.hpp"
#include "qclab/format.hpp"

namespace qclab {

const char* to_string(Planner p) {
  switch (p) {
    case Planner::endpoint: return "endpoint";
    case Planner::uniform: return "uniform";
    case Planner::single_step: return "single-step";
  }
  return "unknown";
}

Planner parse_planner(std::string_view name) {
  if (name == "endpoint") return Planner::endpoint;
  if (name == "uniform") return Planner::uniform;
  if (name == "single-step") return Planner::single_step;
  throw ConfigError("unknown planner '" + std::string(name) + "' (endpoint | uniform | single-step)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_exact(std::string_view text, const char* what) {
  T v{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError(std::string("malformed ") + what + ": '" + std::string(text) + "'");
  return v;
}

}  // namespace

double parse_real(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_exact<double>(text, "number");
  const double num = parse_exact<double>(trim(text.substr(0, slash)), "numerator");
  const double den = parse_exact<double>(trim(text.substr(slash + 1)), "denominator");
  if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view val = trim(line.substr(eq + 1));
    if (key == "potential") c.potential = std::string(val);
    else if (key == "M") c.M = parse_exact<int>(val, "M");
    else if (key == "N") c.N = parse_exact<int>(val, "N");
    else if (key == "K") c.K = parse_exact<int>(val, "K");
    else if (key == "scale") c.scale = parse_real(val);
    else if (key == "alpha") c.alpha = parse_real(val);
    else if (key == "epsilon") c.epsilon = parse_real(val);
    else if (key == "planner") c.planner = parse_planner(val);
    else if (key == "out") c.out = std::string(val);
    else if (key == "seed") c.seed = parse_exact<std::uint64_t>(val, "seed");
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "potential = " << c.potential << '\n'
     << "M = " << c.M << '\n'
     << "N = " << c.N << '\n'
     << "K = " << c.K << '\n'
     << "scale = " << format_double(c.scale) << '\n'
     << "alpha = " << format_double(c.alpha) << '\n'
     << "epsilon = " << format_double(c.epsilon) << '\n'
     << "planner = " << to_string(c.planner) << '\n'
     << "out = " << c.out << '\n'
     << "seed = " << c.seed << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const ExperimentConfig& c) {
  if (c.potential != "lj") throw ConfigError("unknown potential '" + c.potential + "' (only lj is built in)");
  if (!(c.scale > 0.0)) throw ConfigError("scale must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (c.out.empty()) throw ConfigError("out must name a directory");
  try {
    (void)make_mesh(c);
  } catch (const MeshError& e) {
    throw ConfigError(e.what());
  }
}

QcMesh make_mesh(const ExperimentConfig& c) {
  return c.M == c.N ? QcMesh::uniform(c.N, c.K) : QcMesh::coarsened(c.M, c.N, c.K);
}

PairPotential make_potential(const ExperimentConfig& c) {
  if (c.potential != "lj") throw ConfigError("unknown potential '" + c.potential + "'");
  return PairPotential::lennard_jones();
}

}  // namespace qclab
