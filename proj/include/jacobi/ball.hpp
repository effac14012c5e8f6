#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jacobi/geometry.hpp"
#include "jacobi/system.hpp"

namespace jacobi {

double unit_ball_volume(int n);
double unit_sphere_area(int n);

// Geodesic ball around a point, radius measured in kinetic-metric arclength.
struct BallSpec {
  std::vector<double> center;
  double radius = 0.0;
  double radius_cap = 0.0;  // 0 selects 0.25 * the axis turning distance
  double ode_rtol = 1e-9;

  void validate(const SystemSpec& spec) const;
  double effective_cap(const SystemSpec& spec) const;
};

// Kinetic-metric arclength from P to the nearest turning point along the 2n
// coordinate-axis rays; +inf when no ray reaches one inside the horizon.
double turning_axis_distance(const SystemSpec& spec, const std::vector<double>& P);

struct SampleTally {
  long long requested = 0;
  long long completed = 0;
  long long aborted = 0;  // geodesic hit the turning-point margin early
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  SampleTally tally;
};

// Second-order volume expansion; errors out when the curvature term swamps
// the leading term (radius outside the expansion's validity range).
double ball_volume_expansion(const SystemSpec& spec, const BallSpec& ball, double r_p);

// Monte-Carlo volume: uniform directions, one radial geodesic with co-moving
// transversal deviation fields per direction, deterministic per (seed, index).
McEstimate ball_volume_numeric(const SystemSpec& spec, const BallSpec& ball, long long samples,
                               std::uint64_t seed);

// Kinetic-metric norms of the n-1 transversal deviation fields at arclength t,
// each seeded with unit initial covariant velocity. All tend to t as t -> 0.
std::vector<double> deviation_field_norms(const SystemSpec& spec, const std::vector<double>& P,
                                          const std::vector<double>& direction, double t,
                                          double rtol = 1e-9);

struct SphereAverage {
  double lhs = 0.0;  // sphere integral of the directional Ricci average
  double rhs = 0.0;  // scalar curvature times the unit-ball volume
  double rel_err = 0.0;
};

// Directional-average identity: the integral of the Ricci quadratic form over
// unit directions equals the scalar (in the matching normalization) times the
// unit-ball volume.
SphereAverage sphere_average_identity_check(const SystemSpec& spec, const std::vector<double>& P,
                                            long long samples, std::uint64_t seed,
                                            CurvatureNorm norm);

double entropy(double volume, double k_b = 1.0);

struct BallReport {
  int n = 0;
  double energy = 0.0;
  double radius = 0.0;
  double r_p = 0.0;
  std::string r_p_source;
  double vol_expansion = 0.0;
  double vol_numeric = 0.0;
  double vol_std_error = 0.0;
  double entropy_expansion = 0.0;
  double entropy_numeric = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
  SampleTally tally;
};

// Full pipeline at a critical point: curvature scalar in the requested
// normalization, both volume paths, both entropies.
BallReport ball_report(const SystemSpec& spec, const BallSpec& ball, long long samples,
                       std::uint64_t seed, CurvatureNorm norm, double k_b = 1.0);

// Paired base/perturbed volume runs sharing directions and one step sequence
// driven by the base block, so discretization error cancels in the entropy
// difference. Directions come in antithetic pairs; sample_pairs is the number
// of pairs. spec must carry a perturbation; its lambda field is ignored in
// favor of the lambdas list, all integrated simultaneously.
struct TwinVolumeRow {
  double lambda = 0.0;
  double vol_perturbed = 0.0;
  double delta_entropy = 0.0;
  double delta_std_error = 0.0;
};

struct TwinVolumeResult {
  double vol_base = 0.0;
  double vol_base_std_error = 0.0;
  std::vector<TwinVolumeRow> rows;
  SampleTally tally;  // counted in pairs
};

TwinVolumeResult ball_volume_twin(const SystemSpec& spec, const std::vector<double>& lambdas,
                                  const BallSpec& ball, long long sample_pairs,
                                  std::uint64_t seed);

}  // namespace jacobi
