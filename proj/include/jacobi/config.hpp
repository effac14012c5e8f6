#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jacobi/ball.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/system.hpp"

namespace jacobi {

// One run's worth of settings. Parsed from a sectioned key-value file;
// serialize_config emits the canonical form (every field, fixed order), so
// parse -> serialize -> parse is the identity on the struct.
struct RunConfig {
  // [system]
  int n = 0;
  double energy = 0.0;
  std::string potential;     // expression text, required
  std::string perturbation;  // expression text, optional
  double lambda = 0.0;
  double k_b = 1.0;

  // [ball]
  std::vector<double> center;  // empty: locate a critical point instead
  double radius = 0.0;
  double radius_cap = 0.0;  // 0: automatic turning-distance cap

  // [mc]
  long long samples = 100000;
  std::uint64_t seed = 1;

  // [search] critical-point seeds; empty means the origin
  std::vector<std::vector<double>> seeds;

  // [curvature] evaluation points; empty means the resolved center
  std::vector<std::vector<double>> points;

  // [solver] radius is a coordinate length, not Jacobi arclength
  double solver_radius = 0.0;
  double solver_h = 0.0;  // 0: radius/32
  double solver_tol = 1e-8;
  std::string boundary;  // Dirichlet data expression; empty means 0

  // [verify]
  std::vector<double> lambdas{1e-2, 1e-3, 1e-4};
  long long sample_pairs = 20000;

  // [output]
  std::string normalization = "oracle";  // oracle | paper
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Field-level checks that need no expression parsing: ranges, token values,
// dimension agreement between points and n. Throws ConfigError.
void validate_config(const RunConfig& cfg);

// Maps the two accepted normalization tokens onto readings of the curvature
// scalar: "oracle" contracts with the inverse metric, "paper" keeps the
// (n-1)*lap(V)/(2(E-V)) form used by the downstream entropy formulas.
CurvatureNorm normalization_choice(const RunConfig& cfg);

// Builds the mechanical system from the config, parsing both expressions.
SystemSpec system_from_config(const RunConfig& cfg);

BallSpec ball_from_config(const RunConfig& cfg, const std::vector<double>& center);

}  // namespace jacobi
