#include "jacobi/ball.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "jacobi/ode.hpp"
#include "jacobi/rng.hpp"

namespace jacobi {

double unit_ball_volume(int n) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  return std::exp(0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0));
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

namespace {

// Arclength of the straight segment from P to the turning point along one ray,
// measured in the kinetic metric. Plain composite Simpson; the integrand has a
// sqrt root at the far end, which costs accuracy we do not need for a cap.
double ray_length(const SystemSpec& spec, const std::vector<double>& P, int axis, double dir) {
  const double horizon = 1e3;
  const double m = spec.margin();
  std::vector<double> x(P);
  auto w_at = [&](double t) {
    x[axis] = P[axis] + dir * t;
    double w = spec.w_raw(x.data());
    x[axis] = P[axis];
    return w;
  };
  const int scan = 4096;
  double lo = 0.0, hi = -1.0;
  for (int j = 1; j <= scan; ++j) {
    double t = horizon * j / scan;
    if (w_at(t) <= m) {
      hi = t;
      lo = horizon * (j - 1) / scan;
      break;
    }
  }
  if (hi < 0.0) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (w_at(mid) <= m ? hi : lo) = mid;
  }
  double tstar = lo;
  const int intervals = 1024;
  double h = tstar / intervals;
  auto f = [&](double t) {
    double w = w_at(t);
    return w > 0.0 ? std::sqrt(2.0 * w) : 0.0;
  };
  double acc = f(0.0) + f(tstar);
  for (int j = 1; j < intervals; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(j * h);
  return acc * h / 3.0;
}

}  // namespace

double turning_axis_distance(const SystemSpec& spec, const std::vector<double>& P) {
  spec.validate();
  if (static_cast<int>(P.size()) != spec.n) throw ConfigError("point dimension mismatch");
  spec.w_checked(P.data());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.n; ++i) {
    best = std::min(best, ray_length(spec, P, i, 1.0));
    best = std::min(best, ray_length(spec, P, i, -1.0));
  }
  return best;
}

double BallSpec::effective_cap(const SystemSpec& spec) const {
  if (radius_cap > 0.0) return radius_cap;
  return 0.25 * turning_axis_distance(spec, center);
}

void BallSpec::validate(const SystemSpec& spec) const {
  spec.validate();
  if (static_cast<int>(center.size()) != spec.n) throw ConfigError("ball center dimension mismatch");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
  if (!(ode_rtol > 0.0)) throw ConfigError("ode tolerance must be positive");
  double cap = effective_cap(spec);
  if (radius > cap) {
    std::ostringstream os;
    os << "ball radius " << radius << " exceeds the safe cap " << cap
       << " set by the distance to the turning region; reduce the radius or raise the cap";
    throw ConfigError(os.str());
  }
}

double ball_volume_expansion(const SystemSpec& spec, const BallSpec& ball, double r_p) {
  ball.validate(spec);
  const int n = spec.n;
  const double r = ball.radius;
  double lead = unit_ball_volume(n) * std::pow(r, n);
  double vol = lead * (1.0 - r_p * r * r / (6.0 * (n + 2)));
  if (!(vol > 0.0)) {
    std::ostringstream os;
    os << "volume expansion is non-positive at radius " << r
       << "; the curvature term dominates, use a smaller radius";
    throw MathDomainError(os.str());
  }
  return vol;
}

namespace {

// Offsets into one radial-state block: position, velocity, n-1 deviation
// fields with their covariant velocities, and the accumulated volume density.
struct BlockLayout {
  int n = 0;
  int nf = 0;
  int x = 0, v = 0, j = 0, k = 0, acc = 0;
  int size = 0;

  explicit BlockLayout(int dims) : n(dims), nf(dims - 1) {
    x = 0;
    v = n;
    j = 2 * n;
    k = j + nf * n;
    acc = k + nf * n;
    size = acc + 1;
  }
};

struct RhsWorkspace {
  PotentialJet2 jet, scratch;
  std::vector<double> phi, phh, hv, amat, gram;

  void resize(int n) {
    jet.resize(n);
    scratch.resize(n);
    phi.resize(n);
    phh.resize(static_cast<size_t>(n) * n);
    hv.resize(n);
    amat.resize(static_cast<size_t>(n) * n);
    int nf = n - 1;
    gram.resize(static_cast<size_t>(std::max(nf, 1)) * std::max(nf, 1));
  }
};

double gram_det(int m, double* a) {
  // in-place LU with partial pivoting; Gram matrices are PSD so the result is
  // clamped at zero against roundoff
  double det = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
    if (piv != c) {
      for (int q = 0; q < m; ++q) std::swap(a[c * m + q], a[piv * m + q]);
      det = -det;
    }
    double d = a[c * m + c];
    if (d == 0.0) return 0.0;
    det *= d;
    for (int r = c + 1; r < m; ++r) {
      double f = a[r * m + c] / d;
      for (int q = c; q < m; ++q) a[r * m + q] -= f * a[c * m + q];
    }
  }
  return det > 0.0 ? det : 0.0;
}

// Radial transport of one system block: geodesic, deviation fields, volume
// density. Throws MathDomainError when the trajectory reaches the margin.
void block_rhs(const SystemSpec& spec, const BlockLayout& L, const double* y, double* dy,
               RhsWorkspace& ws) {
  const int n = L.n;
  const double* x = y + L.x;
  const double* v = y + L.v;

  spec.total_jet(x, ws.scratch, ws.jet);
  double w = spec.energy - ws.jet.value;
  if (!(w > spec.margin())) {
    std::ostringstream os;
    os << "geodesic reached the turning-point margin: E - V = " << w;
    throw MathDomainError(os.str());
  }

  const double inv2w = 0.5 / w;
  double p2 = 0.0, pv = 0.0, v2 = 0.0;
  for (int i = 0; i < n; ++i) {
    ws.phi[i] = -ws.jet.grad[i] * inv2w;
    p2 += ws.phi[i] * ws.phi[i];
    pv += ws.phi[i] * v[i];
    v2 += v[i] * v[i];
  }
  const double c2 = 2.0 * inv2w * inv2w;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ws.phh[i * n + j] =
          -ws.jet.hess[static_cast<size_t>(i) * n + j] * inv2w - ws.jet.grad[i] * ws.jet.grad[j] * c2;

  for (int i = 0; i < n; ++i) {
    dy[L.x + i] = v[i];
    dy[L.v + i] = v2 * ws.phi[i] - 2.0 * v[i] * pv;
  }

  if (L.nf > 0) {
    // tidal matrix A^i_k contracting the curvature with the velocity twice
    double vphiv = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += ws.phh[i * n + j] * v[j];
      ws.hv[i] = s;
      vphiv += s * v[i];
    }
    const double pv2 = pv * pv;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double a = v[i] * ws.hv[k] + v[k] * ws.hv[i] - v2 * ws.phh[i * n + k] -
                   v[i] * pv * ws.phi[k] - v[k] * pv * ws.phi[i] +
                   (v[i] * v[k]) * p2 + v2 * ws.phi[i] * ws.phi[k];
        if (i == k) a += pv2 - vphiv - v2 * p2;
        ws.amat[i * n + k] = a;
      }

    for (int a = 0; a < L.nf; ++a) {
      const double* J = y + L.j + a * n;
      const double* K = y + L.k + a * n;
      double pJ = 0.0, vJ = 0.0, pK = 0.0, vK = 0.0;
      for (int i = 0; i < n; ++i) {
        pJ += ws.phi[i] * J[i];
        vJ += v[i] * J[i];
        pK += ws.phi[i] * K[i];
        vK += v[i] * K[i];
      }
      for (int i = 0; i < n; ++i) {
        dy[L.j + a * n + i] = K[i] - (v[i] * pJ + J[i] * pv - vJ * ws.phi[i]);
        double aj = 0.0;
        for (int q = 0; q < n; ++q) aj += ws.amat[i * n + q] * J[q];
        dy[L.k + a * n + i] = -(v[i] * pK + K[i] * pv - vK * ws.phi[i]) - aj;
      }
    }

    for (int a = 0; a < L.nf; ++a)
      for (int b = a; b < L.nf; ++b) {
        const double* Ja = y + L.j + a * n;
        const double* Jb = y + L.j + b * n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += Ja[i] * Jb[i];
        ws.gram[a * L.nf + b] = s;
        ws.gram[b * L.nf + a] = s;
      }
    double det = gram_det(L.nf, ws.gram.data());
    dy[L.acc] = std::pow(2.0 * w, 0.5 * L.nf) * std::sqrt(det);
  } else {
    dy[L.acc] = 1.0;
  }
}

// Euclidean orthonormal frame perpendicular to the unit direction X: the
// trailing columns of the Householder reflection exchanging X with an axis.
void transversal_frame(int n, const double* X, std::vector<double>& frame) {
  frame.assign(static_cast<size_t>(n - 1) * n, 0.0);
  if (n == 1) return;
  std::vector<double> w(X, X + n);
  w[0] += X[0] >= 0.0 ? 1.0 : -1.0;
  double ww = 0.0;
  for (int i = 0; i < n; ++i) ww += w[i] * w[i];
  for (int a = 0; a < n - 1; ++a) {
    int col = a + 1;
    double f = 2.0 * w[col] / ww;
    for (int i = 0; i < n; ++i) frame[a * n + i] = (i == col ? 1.0 : 0.0) - f * w[i];
  }
}

void init_block(const SystemSpec& spec, const BlockLayout& L, const double* P, const double* X,
                const std::vector<double>& frame, double* y) {
  const int n = L.n;
  double w = spec.w_checked(P);
  double s0 = 1.0 / std::sqrt(2.0 * w);
  for (int i = 0; i < n; ++i) {
    y[L.x + i] = P[i];
    y[L.v + i] = X[i] * s0;
  }
  for (int a = 0; a < L.nf; ++a)
    for (int i = 0; i < n; ++i) {
      y[L.j + a * n + i] = 0.0;
      y[L.k + a * n + i] = frame[a * n + i] * s0;
    }
  y[L.acc] = 0.0;
}

OdeOptions mc_options(double rtol) {
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = 1e-4 * rtol;  // keeps the tiny volume component under relative control
  opt.max_steps = 500000;
  return opt;
}

}  // namespace

McEstimate ball_volume_numeric(const SystemSpec& spec, const BallSpec& ball, long long samples,
                               std::uint64_t seed) {
  ball.validate(spec);
  if (samples < 1) throw ConfigError("sample count must be >= 1");
  const int n = spec.n;
  const BlockLayout L(n);
  RhsWorkspace ws;
  ws.resize(n);
  std::vector<double> y(L.size), X(n), frame;
  OdeOptions opt = mc_options(ball.ode_rtol);

  std::vector<double> contrib;
  contrib.reserve(static_cast<size_t>(samples));
  McEstimate est;
  est.tally.requested = samples;
  auto rhs = [&](double, const double* s, double* ds) { block_rhs(spec, L, s, ds, ws); };
  for (long long i = 0; i < samples; ++i) {
    Rng rng = Rng::for_sample(seed, static_cast<std::uint64_t>(i));
    rng.unit_vector(n, X.data());
    transversal_frame(n, X.data(), frame);
    init_block(spec, L, ball.center.data(), X.data(), frame, y.data());
    try {
      integrate_rk45(rhs, 0.0, ball.radius, y.data(), L.size, opt);
      contrib.push_back(y[L.acc]);
      ++est.tally.completed;
    } catch (const MathDomainError&) {
      ++est.tally.aborted;
    }
  }
  if (est.tally.completed == 0)
    throw MathDomainError("every sampled geodesic hit the turning-point margin");

  const double alpha = unit_sphere_area(n);
  const long long m = est.tally.completed;
  double mean = 0.0;
  for (double c : contrib) mean += c;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double c : contrib) var += (c - mean) * (c - mean);
  est.value = alpha * mean;
  est.std_error =
      m > 1 ? alpha * std::sqrt(var / (static_cast<double>(m - 1) * static_cast<double>(m))) : 0.0;
  if (!(est.value > 0.0)) throw MathDomainError("estimated volume is non-positive");
  return est;
}

std::vector<double> deviation_field_norms(const SystemSpec& spec, const std::vector<double>& P,
                                          const std::vector<double>& direction, double t,
                                          double rtol) {
  spec.validate();
  const int n = spec.n;
  if (static_cast<int>(P.size()) != n || static_cast<int>(direction.size()) != n)
    throw ConfigError("point or direction dimension mismatch");
  if (!(t > 0.0)) throw ConfigError("arclength must be positive");
  double dn = 0.0;
  for (double d : direction) dn += d * d;
  if (!(dn > 0.0)) throw ConfigError("direction must be nonzero");
  std::vector<double> X(n);
  for (int i = 0; i < n; ++i) X[i] = direction[i] / std::sqrt(dn);

  const BlockLayout L(n);
  RhsWorkspace ws;
  ws.resize(n);
  std::vector<double> y(L.size), frame;
  transversal_frame(n, X.data(), frame);
  init_block(spec, L, P.data(), X.data(), frame, y.data());
  OdeOptions opt = mc_options(rtol);
  auto rhs = [&](double, const double* s, double* ds) { block_rhs(spec, L, s, ds, ws); };
  integrate_rk45(rhs, 0.0, t, y.data(), L.size, opt);

  double w = spec.w_checked(y.data() + L.x);
  std::vector<double> norms(L.nf);
  for (int a = 0; a < L.nf; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += y[L.j + a * n + i] * y[L.j + a * n + i];
    norms[a] = std::sqrt(2.0 * w * s);
  }
  return norms;
}

SphereAverage sphere_average_identity_check(const SystemSpec& spec, const std::vector<double>& P,
                                            long long samples, std::uint64_t seed,
                                            CurvatureNorm norm) {
  spec.validate();
  if (samples < 1) throw ConfigError("sample count must be >= 1");
  if (norm == CurvatureNorm::LaplacianForm)
    throw ConfigError(
        "the directional-average identity holds for the oracle and flat-trace normalizations "
        "only");
  const int n = spec.n;
  std::vector<double> ric = ricci_tensor(spec, P);
  double w = spec.w_checked(P.data());
  ScalarReadings readings = ricci_scalar_readings(spec, P);

  double mean = 0.0;
  std::vector<double> X(n);
  for (long long i = 0; i < samples; ++i) {
    Rng rng = Rng::for_sample(seed, static_cast<std::uint64_t>(i));
    rng.unit_vector(n, X.data());
    double q = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) q += ric[static_cast<size_t>(a) * n + b] * X[a] * X[b];
    if (norm == CurvatureNorm::MetricTrace) q /= 2.0 * w;
    mean += q;
  }
  mean /= static_cast<double>(samples);

  SphereAverage out;
  out.lhs = unit_sphere_area(n) * mean;
  out.rhs = scalar_for_norm(readings, norm) * unit_ball_volume(n);
  double denom = std::max(std::abs(out.rhs), std::abs(out.lhs));
  out.rel_err = denom > 0.0 ? std::abs(out.lhs - out.rhs) / denom : 0.0;
  return out;
}

double entropy(double volume, double k_b) {
  if (!(volume > 0.0)) throw MathDomainError("entropy requires a positive volume");
  return k_b * std::log(volume);
}

BallReport ball_report(const SystemSpec& spec, const BallSpec& ball, long long samples,
                       std::uint64_t seed, CurvatureNorm norm, double k_b) {
  ball.validate(spec);
  ScalarReadings readings = ricci_scalar_readings(spec, ball.center);

  BallReport rep;
  rep.n = spec.n;
  rep.energy = spec.energy;
  rep.radius = ball.radius;
  rep.r_p = scalar_for_norm(readings, norm);
  rep.r_p_source = curvature_norm_name(norm);
  rep.vol_expansion = ball_volume_expansion(spec, ball, rep.r_p);
  McEstimate mc = ball_volume_numeric(spec, ball, samples, seed);
  rep.vol_numeric = mc.value;
  rep.vol_std_error = mc.std_error;
  rep.entropy_expansion = entropy(rep.vol_expansion, k_b);
  rep.entropy_numeric = entropy(rep.vol_numeric, k_b);
  rep.samples = samples;
  rep.seed = seed;
  rep.tally = mc.tally;
  return rep;
}

TwinVolumeResult ball_volume_twin(const SystemSpec& spec, const std::vector<double>& lambdas,
                                  const BallSpec& ball, long long sample_pairs,
                                  std::uint64_t seed) {
  spec.validate();
  if (!spec.perturbation) throw ConfigError("twin volume run requires a perturbation");
  if (sample_pairs < 1) throw ConfigError("sample count must be >= 1");
  if (lambdas.empty()) throw ConfigError("twin volume run requires at least one coupling value");
  ball.validate(spec.unperturbed());

  const int n = spec.n;
  const int blocks = 1 + static_cast<int>(lambdas.size());
  const BlockLayout L(n);
  std::vector<SystemSpec> sys;
  sys.push_back(spec.unperturbed());
  for (double lam : lambdas) {
    SystemSpec s = spec;
    s.lambda = lam;
    sys.push_back(s);
  }

  RhsWorkspace ws;
  ws.resize(n);
  std::vector<double> y(static_cast<size_t>(blocks) * L.size), X(n), Xm(n), frame;
  OdeOptions opt = mc_options(ball.ode_rtol);
  opt.err_dim = L.size;  // base block drives the step sequence for every lambda

  auto rhs = [&](double, const double* s, double* ds) {
    for (int b = 0; b < blocks; ++b) block_rhs(sys[b], L, s + b * L.size, ds + b * L.size, ws);
  };

  const size_t nl = lambdas.size();
  std::vector<double> base_pair;
  std::vector<std::vector<double>> diff_pair(nl);
  base_pair.reserve(static_cast<size_t>(sample_pairs));
  for (auto& d : diff_pair) d.reserve(static_cast<size_t>(sample_pairs));

  TwinVolumeResult out;
  out.tally.requested = sample_pairs;
  std::vector<double> acc_base(2), acc_pert(2 * nl);
  for (long long p = 0; p < sample_pairs; ++p) {
    Rng rng = Rng::for_sample(seed, static_cast<std::uint64_t>(p));
    rng.unit_vector(n, X.data());
    for (int i = 0; i < n; ++i) Xm[i] = -X[i];
    bool ok = true;
    for (int half = 0; half < 2 && ok; ++half) {
      const double* dir = half == 0 ? X.data() : Xm.data();
      transversal_frame(n, dir, frame);
      for (int b = 0; b < blocks; ++b)
        init_block(sys[b], L, ball.center.data(), dir, frame, y.data() + b * L.size);
      try {
        integrate_rk45(rhs, 0.0, ball.radius, y.data(), blocks * L.size, opt);
        acc_base[half] = y[L.acc];
        for (size_t l = 0; l < nl; ++l) acc_pert[half * nl + l] = y[(l + 1) * L.size + L.acc];
      } catch (const MathDomainError&) {
        ok = false;
      }
    }
    if (!ok) {
      ++out.tally.aborted;
      continue;
    }
    ++out.tally.completed;
    base_pair.push_back(0.5 * (acc_base[0] + acc_base[1]));
    for (size_t l = 0; l < nl; ++l)
      diff_pair[l].push_back(0.5 * (acc_pert[0 * nl + l] + acc_pert[1 * nl + l]) -
                             base_pair.back());
  }
  if (out.tally.completed == 0)
    throw MathDomainError("every sampled geodesic pair hit the turning-point margin");

  const double alpha = unit_sphere_area(n);
  const double m = static_cast<double>(out.tally.completed);
  double bmean = 0.0;
  for (double b : base_pair) bmean += b;
  bmean /= m;
  double bvar = 0.0;
  for (double b : base_pair) bvar += (b - bmean) * (b - bmean);
  out.vol_base = alpha * bmean;
  out.vol_base_std_error = m > 1 ? alpha * std::sqrt(bvar / ((m - 1.0) * m)) : 0.0;
  if (!(out.vol_base > 0.0)) throw MathDomainError("estimated base volume is non-positive");

  for (size_t l = 0; l < nl; ++l) {
    double dmean = 0.0;
    for (double d : diff_pair[l]) dmean += d;
    dmean /= m;
    double dvar = 0.0;
    for (double d : diff_pair[l]) dvar += (d - dmean) * (d - dmean);
    TwinVolumeRow row;
    row.lambda = lambdas[l];
    row.vol_perturbed = alpha * (bmean + dmean);
    // log of the volume ratio; errors in the shared factors cancel
    row.delta_entropy = std::log1p(dmean / bmean);
    double dse = m > 1 ? std::sqrt(dvar / ((m - 1.0) * m)) : 0.0;
    row.delta_std_error = dse / (bmean + dmean);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace jacobi
