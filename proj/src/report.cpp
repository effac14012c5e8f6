#include "jacobi/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jacobi/errors.hpp"

namespace jacobi {

const char* const kCsvSchemaLine = "# schema=1";

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";  // drop the sign bit; "-nan" confuses CSV readers
  if (v == 0.0) return "0";         // fold negative zero
  char buf[40];
  std::to_chars_result r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory '" + target.parent_path().string() + "'");
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw ConfigError("failed while writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move temporary file onto '" + path + "'");
  }
}

namespace {

void kv(std::ostringstream& o, const char* key, const std::string& value) {
  o << key << " = " << value << "\n";
}
void kv(std::ostringstream& o, const char* key, double value) { kv(o, key, format_double(value)); }
void kv(std::ostringstream& o, const char* key, long long value) {
  kv(o, key, std::to_string(value));
}
void kv(std::ostringstream& o, const char* key, std::uint64_t value) {
  kv(o, key, std::to_string(value));
}
void kv(std::ostringstream& o, const char* key, int value) { kv(o, key, std::to_string(value)); }
void kv(std::ostringstream& o, const char* key, long value) { kv(o, key, std::to_string(value)); }

std::string joined(const std::vector<double>& v, char sep = ' ') {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string ball_report_csv(const BallReport& r) {
  std::ostringstream o;
  o << kCsvSchemaLine << "\n";
  o << "n,E,r,R_p,R_p_source,vol_exp,vol_mc,vol_mc_stderr,S_exp,S_mc,samples,seed\n";
  o << r.n << ',' << format_double(r.energy) << ',' << format_double(r.radius) << ','
    << format_double(r.r_p) << ',' << r.r_p_source << ',' << format_double(r.vol_expansion) << ','
    << format_double(r.vol_numeric) << ',' << format_double(r.vol_std_error) << ','
    << format_double(r.entropy_expansion) << ',' << format_double(r.entropy_numeric) << ','
    << r.samples << ',' << r.seed << "\n";
  return o.str();
}

std::string ball_report_key_value(const BallReport& r) {
  std::ostringstream o;
  kv(o, "n", r.n);
  kv(o, "E", r.energy);
  kv(o, "r", r.radius);
  kv(o, "R_p", r.r_p);
  kv(o, "R_p_source", r.r_p_source);
  kv(o, "vol_exp", r.vol_expansion);
  kv(o, "vol_mc", r.vol_numeric);
  kv(o, "vol_mc_stderr", r.vol_std_error);
  kv(o, "S_exp", r.entropy_expansion);
  kv(o, "S_mc", r.entropy_numeric);
  kv(o, "samples", r.samples);
  kv(o, "seed", r.seed);
  kv(o, "samples_requested", r.tally.requested);
  kv(o, "samples_completed", r.tally.completed);
  kv(o, "samples_aborted", r.tally.aborted);
  return o.str();
}

std::string perturbation_report_csv(const PerturbationReport& r) {
  std::ostringstream o;
  o << kCsvSchemaLine << "\n";
  o << "n,E,lambda,normalization,R_p,sigma_c,B_trace,B_trace_exact,delta_R,dS_exact,dS_linear,"
       "mass,E_special,residual_coefficient,residual_at_center\n";
  o << r.n << ',' << format_double(r.energy) << ',' << format_double(r.lambda) << ','
    << r.normalization << ',' << format_double(r.r_p) << ',' << format_double(r.sigma_at_center)
    << ',' << format_double(r.b_trace) << ',' << format_double(r.b_trace_exact) << ','
    << format_double(r.delta_r) << ',' << format_double(r.delta_s_exact) << ','
    << format_double(r.delta_s_linear) << ',' << format_double(r.mass) << ','
    << format_double(r.special_energy_value) << ',' << format_double(r.residual_coefficient) << ','
    << format_double(r.invariance_residual_at_center) << "\n";
  return o.str();
}

std::string perturbation_report_key_value(const PerturbationReport& r) {
  std::ostringstream o;
  kv(o, "n", r.n);
  kv(o, "E", r.energy);
  kv(o, "lambda", r.lambda);
  kv(o, "normalization", r.normalization);
  kv(o, "R_p", r.r_p);
  kv(o, "sigma_c", r.sigma_at_center);
  kv(o, "B_trace", r.b_trace);
  kv(o, "B_trace_exact", r.b_trace_exact);
  kv(o, "delta_R", r.delta_r);
  kv(o, "dS_exact", r.delta_s_exact);
  kv(o, "dS_linear", r.delta_s_linear);
  kv(o, "mass", r.mass);
  kv(o, "E_special", r.special_energy_value);
  kv(o, "residual_coefficient", r.residual_coefficient);
  kv(o, "residual_at_center", r.invariance_residual_at_center);
  return o.str();
}

std::string curvature_csv(int n, double energy, const std::vector<CurvatureRow>& rows) {
  std::ostringstream o;
  o << kCsvSchemaLine << "\n";
  o << "# n=" << n << " E=" << format_double(energy) << "\n";
  for (int d = 1; d <= n; ++d) o << 'x' << d << ',';
  o << "scalar_flat,scalar_paper,scalar_oracle\n";
  for (const CurvatureRow& row : rows) {
    for (double c : row.point) o << format_double(c) << ',';
    o << format_double(row.scalars.flat_trace) << ',' << format_double(row.scalars.laplacian_form)
      << ',' << format_double(row.scalars.metric) << "\n";
  }
  return o.str();
}

std::string curvature_key_value(int n, double energy, const std::vector<CurvatureRow>& rows) {
  std::ostringstream o;
  kv(o, "n", n);
  kv(o, "E", energy);
  for (const CurvatureRow& row : rows) {
    o << "\n";
    kv(o, "point", joined(row.point));
    kv(o, "scalar_flat", row.scalars.flat_trace);
    kv(o, "scalar_paper", row.scalars.laplacian_form);
    kv(o, "scalar_oracle", row.scalars.metric);
  }
  return o.str();
}

std::string grid_csv(const GridSolution& g) {
  std::ostringstream o;
  o << kCsvSchemaLine << "\n";
  for (int d = 1; d <= g.n; ++d) o << 'x' << d << ',';
  o << "value\n";
  std::vector<int> idx(g.n, -g.m);
  const long lat = g.lattice_size();
  for (long lin = 0; lin < lat; ++lin) {
    if (g.interior(idx)) {
      std::vector<double> x = g.node_point(idx);
      for (double c : x) o << format_double(c) << ',';
      o << format_double(g.values[g.lattice_index(idx)]) << "\n";
    }
    for (int d = g.n - 1; d >= 0; --d) {
      if (++idx[d] <= g.m) break;
      idx[d] = -g.m;
    }
  }
  return o.str();
}

std::string grid_key_value(const GridSolution& g) {
  std::ostringstream o;
  kv(o, "n", g.n);
  kv(o, "center", joined(g.center));
  kv(o, "r", g.radius);
  kv(o, "h", g.h);
  kv(o, "m", g.m);
  kv(o, "mass", g.mass_used);
  kv(o, "coefficient", g.coefficient);
  kv(o, "residual", g.residual_norm);
  kv(o, "iterations", g.iterations);
  return o.str();
}

void write_grid_binary(const std::string& path, const GridSolution& g) {
  std::ostringstream head;
  head << "jacobi-grid 1\n";
  head << "dims " << g.n;
  for (int d = 0; d < g.n; ++d) head << ' ' << g.side();
  head << "\n";
  head << "h " << format_double(g.h) << "\n";
  head << "r " << format_double(g.radius) << "\n";
  head << "M " << format_double(g.mass_used) << "\n";
  head << "center " << joined(g.center) << "\n";
  head << "layout row-major float64 native-endian\n";
  head << "end-header\n";
  std::string content = head.str();
  content.append(reinterpret_cast<const char*>(g.values.data()),
                 g.values.size() * sizeof(double));
  write_text_atomic(path, content);
}

std::string invariance_check_csv(const InvarianceCheck& c) {
  std::ostringstream o;
  o << kCsvSchemaLine << "\n";
  o << "# slope=" << format_double(c.slope) << "\n";
  o << "lambda,delta_S,delta_S_stderr\n";
  for (const InvarianceCheckRow& row : c.rows)
    o << format_double(row.lambda) << ',' << format_double(row.delta_entropy) << ','
      << format_double(row.std_error) << "\n";
  return o.str();
}

std::string invariance_check_key_value(const InvarianceCheck& c) {
  std::ostringstream o;
  kv(o, "slope", c.slope);
  kv(o, "vol_base", c.vol_base);
  kv(o, "rows", static_cast<long long>(c.rows.size()));
  kv(o, "pairs_requested", c.tally.requested);
  kv(o, "pairs_completed", c.tally.completed);
  kv(o, "pairs_aborted", c.tally.aborted);
  return o.str();
}

}  // namespace jacobi
