#pragma once

#include <string>
#include <vector>

#include "jacobi/ball.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/perturbation.hpp"
#include "jacobi/solver.hpp"

namespace jacobi {

// Shortest decimal form that parses back to the same double. All emitted
// numbers go through this, which is what makes repeated runs byte-identical.
std::string format_double(double v);

// Writes content to path via a temporary file in the same directory followed
// by an atomic rename, so a failed run never leaves a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

// Every CSV starts with this versioned marker line.
extern const char* const kCsvSchemaLine;

std::string ball_report_csv(const BallReport& r);
std::string ball_report_key_value(const BallReport& r);

std::string perturbation_report_csv(const PerturbationReport& r);
std::string perturbation_report_key_value(const PerturbationReport& r);

// One evaluation point with all three curvature-scalar readings.
struct CurvatureRow {
  std::vector<double> point;
  ScalarReadings scalars;
};

std::string curvature_csv(int n, double energy, const std::vector<CurvatureRow>& rows);
std::string curvature_key_value(int n, double energy, const std::vector<CurvatureRow>& rows);

// Interior nodes only: coordinates then the solved value.
std::string grid_csv(const GridSolution& g);
std::string grid_key_value(const GridSolution& g);  // summary without node data

// Text header (dimensions, spacing, radius, mass) terminated by "end-header",
// then the dense lattice as native-endian float64, row-major, NaN off the ball.
void write_grid_binary(const std::string& path, const GridSolution& g);

std::string invariance_check_csv(const InvarianceCheck& c);
std::string invariance_check_key_value(const InvarianceCheck& c);

}  // namespace jacobi
