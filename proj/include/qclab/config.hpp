#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qclab/mesh.hpp"
#include "qclab/potential.hpp"

namespace qclab {

enum class Planner { endpoint, uniform, single_step };
const char* to_string(Planner p);
Planner parse_planner(std::string_view name);

/// Parameters of one experiment. Defaults reproduce the uncoarsened Lennard-Jones
/// chain with 16 atoms and an atomistic region of 6 spacings.
struct ExperimentConfig {
  std::string potential = "lj";
  int M = 7;
  int N = 7;
  int K = 3;
  double scale = 2.76;  ///< Phi(s) = scale * s
  double alpha = 8.0 / 9.0;
  double epsilon = 1e-6;
  Planner planner = Planner::endpoint;
  std::string out = "out";
  std::uint64_t seed = 20240611;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat "key = value" lines; '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError. Fractions such as 8/9 are accepted for reals.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& c);

/// FNV-1a 64 of to_text(c), as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// Throws ConfigError unless the mesh can be built and the numeric fields are in range.
void validate(const ExperimentConfig& c);

/// Uniform mesh when M == N, otherwise the coarsened layout.
QcMesh make_mesh(const ExperimentConfig& c);
PairPotential make_potential(const ExperimentConfig& c);

/// Parses a real, also in the form p/q.
double parse_real(std::string_view text);

}  // namespace qclab
