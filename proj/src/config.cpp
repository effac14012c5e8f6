#include "jacobi/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jacobi/potential.hpp"
#include "jacobi/report.hpp"

namespace jacobi {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  std::string t = trim(text);
  T out{};
  const char* first = t.data();
  const char* last = t.data() + t.size();
  std::from_chars_result r = std::from_chars(first, last, out);
  if (r.ec != std::errc() || r.ptr != last)
    throw ConfigError("cannot parse '" + t + "' as a number for " + where);
  return out;
}

std::vector<double> parse_vector(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(parse_number<double>(tok, where));
  return out;
}

std::vector<std::vector<double>> parse_points(const std::string& text, const std::string& where) {
  std::vector<std::vector<double>> out;
  std::string group;
  std::istringstream in(text);
  while (std::getline(in, group, ';')) {
    std::vector<double> p = parse_vector(group, where);
    if (!p.empty()) out.push_back(std::move(p));
  }
  return out;
}

std::string join_vector(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string join_points(const std::vector<std::vector<double>>& pts) {
  std::string out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) out += "; ";
    out += join_vector(pts[i]);
  }
  return out;
}

void check_single_line(const std::string& value, const std::string& where) {
  if (value.find('\n') != std::string::npos || value.find('\r') != std::string::npos)
    throw ConfigError(where + " must be a single line");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string full = section + "." + key;
    for (const std::string& s : seen)
      if (s == full) throw ConfigError("duplicate config key '" + full + "'");
    seen.push_back(full);

    if (full == "system.n") {
      cfg.n = parse_number<int>(value, full);
    } else if (full == "system.energy") {
      cfg.energy = parse_number<double>(value, full);
    } else if (full == "system.potential") {
      cfg.potential = value;
    } else if (full == "system.perturbation") {
      cfg.perturbation = value;
    } else if (full == "system.lambda") {
      cfg.lambda = parse_number<double>(value, full);
    } else if (full == "system.k_b") {
      cfg.k_b = parse_number<double>(value, full);
    } else if (full == "ball.center") {
      cfg.center = parse_vector(value, full);
    } else if (full == "ball.radius") {
      cfg.radius = parse_number<double>(value, full);
    } else if (full == "ball.radius_cap") {
      cfg.radius_cap = parse_number<double>(value, full);
    } else if (full == "mc.samples") {
      cfg.samples = parse_number<long long>(value, full);
    } else if (full == "mc.seed") {
      cfg.seed = parse_number<std::uint64_t>(value, full);
    } else if (full == "search.seeds") {
      cfg.seeds = parse_points(value, full);
    } else if (full == "curvature.points") {
      cfg.points = parse_points(value, full);
    } else if (full == "solver.radius") {
      cfg.solver_radius = parse_number<double>(value, full);
    } else if (full == "solver.h") {
      cfg.solver_h = parse_number<double>(value, full);
    } else if (full == "solver.tolerance") {
      cfg.solver_tol = parse_number<double>(value, full);
    } else if (full == "solver.boundary") {
      cfg.boundary = value;
    } else if (full == "verify.lambdas") {
      cfg.lambdas = parse_vector(value, full);
    } else if (full == "verify.sample_pairs") {
      cfg.sample_pairs = parse_number<long long>(value, full);
    } else if (full == "output.normalization") {
      cfg.normalization = value;
    } else if (full == "output.dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("unknown config key '" + full + "' at line " + std::to_string(lineno));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[system]\n";
  out << "n = " << cfg.n << "\n";
  out << "energy = " << format_double(cfg.energy) << "\n";
  out << "potential = " << cfg.potential << "\n";
  out << "perturbation = " << cfg.perturbation << "\n";
  out << "lambda = " << format_double(cfg.lambda) << "\n";
  out << "k_b = " << format_double(cfg.k_b) << "\n";
  out << "\n[ball]\n";
  out << "center = " << join_vector(cfg.center) << "\n";
  out << "radius = " << format_double(cfg.radius) << "\n";
  out << "radius_cap = " << format_double(cfg.radius_cap) << "\n";
  out << "\n[mc]\n";
  out << "samples = " << cfg.samples << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[search]\n";
  out << "seeds = " << join_points(cfg.seeds) << "\n";
  out << "\n[curvature]\n";
  out << "points = " << join_points(cfg.points) << "\n";
  out << "\n[solver]\n";
  out << "radius = " << format_double(cfg.solver_radius) << "\n";
  out << "h = " << format_double(cfg.solver_h) << "\n";
  out << "tolerance = " << format_double(cfg.solver_tol) << "\n";
  out << "boundary = " << cfg.boundary << "\n";
  out << "\n[verify]\n";
  out << "lambdas = " << join_vector(cfg.lambdas) << "\n";
  out << "sample_pairs = " << cfg.sample_pairs << "\n";
  out << "\n[output]\n";
  out << "normalization = " << cfg.normalization << "\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("system.n must be at least 1");
  if (!std::isfinite(cfg.energy)) throw ConfigError("system.energy must be finite");
  if (cfg.potential.empty()) throw ConfigError("system.potential is required");
  if (!std::isfinite(cfg.lambda)) throw ConfigError("system.lambda must be finite");
  if (cfg.lambda != 0.0 && cfg.perturbation.empty())
    throw ConfigError("system.lambda is set but system.perturbation is empty");
  if (!(cfg.k_b > 0.0)) throw ConfigError("system.k_b must be positive");
  if (!cfg.center.empty() && static_cast<int>(cfg.center.size()) != cfg.n)
    throw ConfigError("ball.center must have system.n coordinates");
  if (cfg.radius < 0.0) throw ConfigError("ball.radius must not be negative");
  if (cfg.radius_cap < 0.0) throw ConfigError("ball.radius_cap must not be negative");
  if (cfg.samples <= 0) throw ConfigError("mc.samples must be positive");
  for (const auto& p : cfg.seeds)
    if (static_cast<int>(p.size()) != cfg.n)
      throw ConfigError("every search.seeds point needs system.n coordinates");
  for (const auto& p : cfg.points)
    if (static_cast<int>(p.size()) != cfg.n)
      throw ConfigError("every curvature.points point needs system.n coordinates");
  if (cfg.solver_radius < 0.0) throw ConfigError("solver.radius must not be negative");
  if (cfg.solver_h < 0.0) throw ConfigError("solver.h must not be negative");
  if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver.tolerance must be positive");
  if (cfg.lambdas.empty()) throw ConfigError("verify.lambdas must not be empty");
  for (double l : cfg.lambdas)
    if (!(l > 0.0)) throw ConfigError("verify.lambdas entries must be positive");
  if (cfg.sample_pairs <= 0) throw ConfigError("verify.sample_pairs must be positive");
  if (cfg.normalization != "oracle" && cfg.normalization != "paper")
    throw ConfigError("output.normalization must be 'oracle' or 'paper'");
  if (cfg.out_dir.empty()) throw ConfigError("output.dir must not be empty");
  check_single_line(cfg.potential, "system.potential");
  check_single_line(cfg.perturbation, "system.perturbation");
  check_single_line(cfg.boundary, "solver.boundary");
  check_single_line(cfg.normalization, "output.normalization");
  check_single_line(cfg.out_dir, "output.dir");
}

CurvatureNorm normalization_choice(const RunConfig& cfg) {
  if (cfg.normalization == "oracle") return CurvatureNorm::MetricTrace;
  if (cfg.normalization == "paper") return CurvatureNorm::LaplacianForm;
  throw ConfigError("output.normalization must be 'oracle' or 'paper'");
}

SystemSpec system_from_config(const RunConfig& cfg) {
  validate_config(cfg);
  SystemSpec s;
  s.n = cfg.n;
  s.energy = cfg.energy;
  s.potential = make_expr_potential(cfg.potential, cfg.n);
  if (!cfg.perturbation.empty()) {
    s.perturbation = make_expr_potential(cfg.perturbation, cfg.n);
    s.lambda = cfg.lambda;
  }
  s.validate();
  return s;
}

BallSpec ball_from_config(const RunConfig& cfg, const std::vector<double>& center) {
  if (!(cfg.radius > 0.0)) throw ConfigError("ball.radius must be positive for this command");
  BallSpec b;
  b.center = center;
  b.radius = cfg.radius;
  b.radius_cap = cfg.radius_cap;
  return b;
}

}  // namespace jacobi
