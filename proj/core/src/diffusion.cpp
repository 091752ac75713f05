#include "affine/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affine/error.hpp"
#include "affine/rng.hpp"

namespace affine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double dot(const RealVector& a, const RealVector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RealVector mv(const RealMatrix& m, const RealVector& v) {
  RealVector out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

RealMatrix transpose_real(const RealMatrix& m) {
  RealMatrix t(m[0].size(), RealVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
  return t;
}

}  // namespace

SpaceTime::SpaceTime(const AffineAlgebra& alg) : alg_(alg), l_(alg.rank()) {
  if (!alg.untwisted()) throw DomainError("space-time chamber requires an untwisted algebra");
  hv_ = static_cast<double>(alg.dual_coxeter());
  G_ = alg.finite_gram_real();
  L_ = cholesky(G_);
  Linv_t_ = inverse(transpose_real(L_));
  rho_root_ = to_real(alg.rho().z);
  rho_y_ = to_ortho(rho_root_);
  const WeylGroup& W = alg.weyl();
  for (std::size_t w = 0; w < W.order(); ++w) {
    wmat_.push_back(W.real_matrix(w));
    wsign_.push_back(W.finite()[w].sign);
  }
  cartan_.assign(l_ + 1, RealVector(l_ + 1));
  for (std::size_t i = 0; i <= l_; ++i)
    for (std::size_t j = 0; j <= l_; ++j) cartan_[i][j] = static_cast<double>(alg.entry(i, j));
}

RealVector SpaceTime::to_root(const RealVector& y) const { return mv(Linv_t_, y); }

RealVector SpaceTime::to_ortho(const RealVector& root) const {
  RealVector y(l_, 0.0);
  for (std::size_t i = 0; i < l_; ++i)
    for (std::size_t j = 0; j < l_; ++j) y[i] += L_[j][i] * root[j];
  return y;
}

SpaceTimePoint SpaceTime::from_weight(const Weight& w) const {
  alg_.check_weight(w);
  return {w.k.get_d(), to_ortho(to_real(w.z))};
}

Weight SpaceTime::to_weight(const SpaceTimePoint& p, long den) const {
  RealVector r = to_root(p.z);
  RationalVector z(l_);
  for (std::size_t i = 0; i < l_; ++i) z[i] = Rational(std::lround(r[i] * den), den);
  return Weight(Rational(std::lround(p.s * den), den), z, 0);
}

RealVector SpaceTime::pairings(const SpaceTimePoint& p) const {
  RealVector r = to_root(p.z);
  RealVector out(l_ + 1, 0.0);
  for (std::size_t i = 0; i <= l_; ++i) {
    double v = i == 0 ? p.s : 0.0;
    for (std::size_t j = 0; j < l_; ++j) v += cartan_[i][j + 1] * r[j];
    out[i] = v;
  }
  return out;
}

ChamberTest SpaceTime::chamber(const SpaceTimePoint& p) const {
  RealVector pr = pairings(p);
  ChamberTest c;
  c.margin = *std::min_element(pr.begin(), pr.end());
  c.inside = c.margin >= 0;
  return c;
}

double SpaceTime::heat_density(const SpaceTimePoint& x, const SpaceTimePoint& y, double t, bool drifted) const {
  if (!(t > 0)) throw DomainError("heat_density: t must be > 0");
  if (std::fabs(y.s - x.s - t * hv_) > 1e-9) return 0.0;
  double q = 0;
  for (std::size_t i = 0; i < l_; ++i) {
    double d = y.z[i] - x.z[i] - (drifted ? rho_y_[i] * t : 0.0);
    q += d * d;
  }
  return std::exp(-0.5 * l_ * std::log(2 * M_PI * t) - q / (2 * t));
}

double SpaceTime::girsanov_factor(const SpaceTimePoint& x, const SpaceTimePoint& y, double t) const {
  double lin = 0;
  for (std::size_t i = 0; i < l_; ++i) lin += rho_y_[i] * (y.z[i] - x.z[i]);
  return std::exp(lin - 0.5 * dot(rho_y_, rho_y_) * t);
}

const std::vector<RealVector>& SpaceTime::ball(double radius) const {
  long key = static_cast<long>(std::ceil(radius * 4.0));
  auto it = balls_.find(key);
  if (it != balls_.end()) return it->second;
  const WeylGroup& W = alg_.weyl();
  std::vector<RealVector> pts;
  for (const auto& c : W.lattice_ball(key / 4.0)) {
    IntVector r = W.to_root_coords(c);
    pts.emplace_back(r.begin(), r.end());
  }
  return balls_.emplace(key, std::move(pts)).first->second;
}

DensityResult SpaceTime::gaussian_sum(const std::vector<Quad>& quads, double log_tol, const RealVector*,
                                      bool identity_only) const {
  const WeylGroup& W = alg_.weyl();
  double radius = 0;
  std::vector<double> gn(quads.size());
  for (std::size_t q = 0; q < quads.size(); ++q) {
    gn[q] = std::sqrt(std::max(0.0, dot(mv(G_, quads[q].g), quads[q].g)));
    radius = std::max(radius, gaussian_tail_radius(W, quads[q].a, gn[q], quads[q].c, log_tol));
  }
  DensityResult out;
  static const std::vector<RealVector> origin_only{RealVector()};
  const auto& pts = ball(radius);
  double l1 = 0, tail = 0;
  for (std::size_t q = 0; q < quads.size(); ++q) {
    const Quad& qd = quads[q];
    if (identity_only && q > 0) break;
    RealVector gg = mv(G_, qd.g);
    for (const auto& al : pts) {
      bool origin = std::all_of(al.begin(), al.end(), [](double v) { return v == 0; });
      if (identity_only && !origin) continue;
      double e = qd.c + dot(gg, al) - qd.a * dot(mv(G_, al), al);
      double t = std::exp(e);
      out.value += qd.sign * t;
      l1 += t;
      ++out.terms;
    }
    if (!identity_only) tail += std::exp(gaussian_tail_log(W, qd.a, gn[q], qd.c, radius));
  }
  out.tail_bound = tail + 4.0 * static_cast<double>(out.terms) * 1.2e-16 * l1;
  return out;
}

EvalResult SpaceTime::survival(const SpaceTimePoint& x, double eps) const {
  ChamberTest c = chamber(x);
  if (c.margin < -1e-12) throw DomainError("survival: point outside the chamber");
  if (!(x.s > 0)) throw DomainError("survival: level must be > 0");
  RealVector z = to_root(x.z);
  std::vector<Quad> quads;
  for (std::size_t w = 0; w < wmat_.size(); ++w) {
    RealVector u = mv(wmat_[w], rho_root_);
    Quad q{wsign_[w], 0, RealVector(l_), 0.5 * x.s * hv_};
    RealVector diff(l_);
    for (std::size_t i = 0; i < l_; ++i) {
      diff[i] = u[i] - rho_root_[i];
      q.g[i] = hv_ * z[i] - x.s * u[i];
    }
    q.c = dot(mv(G_, z), diff);
    quads.push_back(std::move(q));
  }
  DensityResult d = gaussian_sum(quads, std::log(eps), nullptr, false);
  EvalResult out;
  out.value = d.value;
  out.log_value = d.value > 0 ? std::log(d.value) : kNegInf;
  out.tail_bound = d.tail_bound;
  out.truncation_depth = static_cast<long>(d.terms);
  out.method = "weyl";
  return out;
}

GradientResult SpaceTime::survival_gradient(const SpaceTimePoint& x, double eps) const {
  ChamberTest c = chamber(x);
  if (c.margin <= 0) throw DomainError("survival_gradient: point must be strictly inside the chamber");
  const WeylGroup& W = alg_.weyl();
  RealVector z = to_root(x.z);
  RealVector gz = mv(G_, z);
  const double a = 0.5 * x.s * hv_;
  double gmax = 0, cmax = kNegInf;
  std::vector<RealVector> us;
  for (std::size_t w = 0; w < wmat_.size(); ++w) {
    RealVector u = mv(wmat_[w], rho_root_);
    RealVector g(l_), diff(l_);
    for (std::size_t i = 0; i < l_; ++i) {
      g[i] = hv_ * z[i] - x.s * u[i];
      diff[i] = u[i] - rho_root_[i];
    }
    double gn = std::sqrt(std::max(0.0, dot(mv(G_, g), g)));
    double cc = dot(gz, diff);
    // |v| and |b| are at most K e^{|alpha|}, absorbed by g + 1
    double kk = std::sqrt(dot(mv(G_, diff), diff)) + std::sqrt(dot(mv(G_, u), u)) + 2 * hv_ + 1;
    gmax = std::max(gmax, gn + 1);
    cmax = std::max(cmax, cc + std::log(kk));
    us.push_back(u);
  }
  const double radius = gaussian_tail_radius(W, a, gmax, cmax, std::log(eps));
  GradientResult out;
  out.dz.assign(l_, 0.0);
  const auto& pts = ball(radius);
  RealVector droot(l_, 0.0);
  double l1 = 0;
  for (std::size_t w = 0; w < wmat_.size(); ++w) {
    const RealVector& u = us[w];
    for (const auto& al : pts) {
      RealVector v(l_);
      for (std::size_t i = 0; i < l_; ++i) v[i] = u[i] - rho_root_[i] + hv_ * al[i];
      RealVector gal = mv(G_, al);
      double b = -(dot(gal, u) + 0.5 * hv_ * dot(gal, al));
      double e = std::exp(dot(gz, v) + x.s * b) * wsign_[w];
      out.value += e;
      out.ds += e * b;
      for (std::size_t i = 0; i < l_; ++i) droot[i] += e * v[i];
      l1 += std::fabs(e) * (1 + std::fabs(b));
    }
  }
  const double tail = static_cast<double>(wmat_.size()) * std::exp(gaussian_tail_log(W, a, gmax, cmax, radius));
  // d/dy of (z|v) with z = L^{-T} y is L^{-1} G v = L^T v
  out.dz = to_ortho(droot);
  out.tail_bound = tail + 8.0 * static_cast<double>(pts.size() * wmat_.size()) * 1.2e-16 * l1;
  return out;
}

DensityResult SpaceTime::reflected_density(const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                                           DensityMode mode, double eps, bool identity_only) const {
  if (!(t > 0)) throw DomainError("reflected_density: t must be > 0");
  if (std::fabs(y.s - x.s - t * hv_) > 1e-9) throw DomainError("reflected_density: levels are not consistent");
  if (!(x.s > 0)) throw DomainError("reflected_density: level must be > 0");
  if (mode == DensityMode::undrifted) {
    DensityResult d = killed_density_undrifted(x, y, t, eps);
    double f = girsanov_factor(x, y, t);
    d.value *= f;
    d.tail_bound *= f;
    if (identity_only) {
      d.value = heat_density(x, y, t, true);
      d.tail_bound = 0;
      d.terms = 1;
    }
    return d;
  }
  const RealVector z = to_root(x.z), Y = to_root(y.z), &r = rho_root_;
  const double lognorm = -0.5 * l_ * std::log(2 * M_PI * t);
  std::vector<Quad> quads;
  double peak = kNegInf;
  for (std::size_t w = 0; w < wmat_.size(); ++w) {
    Quad q{wsign_[w], 0, RealVector(l_), 0};
    if (mode == DensityMode::drifted_by_x) {
      const double s = x.s;
      RealVector u = mv(wmat_[w], z), m(l_), d(l_), uz(l_);
      for (std::size_t i = 0; i < l_; ++i) {
        m[i] = Y[i] - r[i] * t;
        d[i] = u[i] - m[i];
        uz[i] = u[i] - z[i];
        q.g[i] = s * r[i] - hv_ * u[i] - (s / t) * d[i];
      }
      q.c = dot(mv(G_, uz), r) - dot(mv(G_, d), d) / (2 * t) + lognorm;
      q.a = 0.5 * hv_ * s + s * s / (2 * t);
    } else {
      const double sy = y.s;
      RealVector u = mv(wmat_[w], Y), m(l_), d(l_), yu(l_);
      for (std::size_t i = 0; i < l_; ++i) {
        m[i] = z[i] + r[i] * t;
        d[i] = u[i] - m[i];
        yu[i] = Y[i] - u[i];
        q.g[i] = -sy * r[i] + hv_ * u[i] - (sy / t) * d[i];
      }
      q.c = dot(mv(G_, yu), r) - dot(mv(G_, d), d) / (2 * t) + lognorm;
      q.a = sy * sy / (2 * t) - 0.5 * hv_ * sy;
    }
    double gn2 = dot(mv(G_, q.g), q.g);
    peak = std::max(peak, q.c + gn2 / (4 * q.a));
    quads.push_back(std::move(q));
  }
  return gaussian_sum(quads, std::log(eps) + peak, nullptr, identity_only);
}

DensityResult SpaceTime::killed_density_undrifted(const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                                                  double eps) const {
  if (!(t > 0)) throw DomainError("killed_density_undrifted: t must be > 0");
  if (std::fabs(y.s - x.s - t * hv_) > 1e-9) throw DomainError("killed_density_undrifted: levels are not consistent");
  const RealVector z = to_root(x.z), Y = to_root(y.z);
  const double s = x.s, lognorm = -0.5 * l_ * std::log(2 * M_PI * t);
  std::vector<Quad> quads;
  double peak = kNegInf;
  for (std::size_t w = 0; w < wmat_.size(); ++w) {
    RealVector u = mv(wmat_[w], z), d(l_);
    Quad q{wsign_[w], 0, RealVector(l_), 0.5 * hv_ * s + s * s / (2 * t)};
    for (std::size_t i = 0; i < l_; ++i) {
      d[i] = u[i] - Y[i];
      q.g[i] = -hv_ * u[i] - (s / t) * d[i];
    }
    q.c = -dot(mv(G_, d), d) / (2 * t) + lognorm;
    peak = std::max(peak, q.c + dot(mv(G_, q.g), q.g) / (4 * q.a));
    quads.push_back(std::move(q));
  }
  return gaussian_sum(quads, std::log(eps) + peak, nullptr, false);
}

double SpaceTime::g_w(const AffineWeylElement& w, const SpaceTimePoint& p) const {
  const Weight& rho = alg_.rho();
  Weight d = apply(alg_, w, rho) - rho;
  RealVector z = to_root(p.z);
  return std::exp(dot(mv(G_, z), to_real(d.z)) + p.s * d.b.get_d());
}

// ---------------------------------------------------------------- free functions

ChamberTest chamber_test(const AffineAlgebra& alg, const SpaceTimePoint& p) { return SpaceTime(alg).chamber(p); }

double heat_density(const AffineAlgebra& alg, const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                    bool drifted) {
  return SpaceTime(alg).heat_density(x, y, t, drifted);
}

EvalResult survival(const AffineAlgebra& alg, const SpaceTimePoint& x, double eps) {
  return SpaceTime(alg).survival(x, eps);
}

GradientResult survival_gradient(const AffineAlgebra& alg, const SpaceTimePoint& x) {
  return SpaceTime(alg).survival_gradient(x);
}

DensityResult reflected_density(const AffineAlgebra& alg, const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                                DensityMode mode) {
  return SpaceTime(alg).reflected_density(x, y, t, mode);
}

double wonpt_residual(const AffineAlgebra& alg, const Weight& x, const Weight& y, const Rational& t,
                      const AffineWeylElement& w) {
  if (!(t > 0)) throw DomainError("wonpt_residual: t must be > 0");
  const Rational hv(alg.dual_coxeter());
  if (y.k != x.k + t * hv) throw DomainError("wonpt_residual: levels are not consistent");
  const Weight wx = apply(alg, w, x), wy = apply(alg, w, y);
  auto quad = [&](const Weight& a, const Weight& b) {
    RationalVector d(a.z.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = b.z[i] - a.z[i];
    return Rational(alg.finite_inner(d, d) / (2 * t));
  };
  const double lognorm = -0.5 * static_cast<double>(alg.rank()) * std::log(2 * M_PI * t.get_d());
  const Weight h_lambda0 = hv * alg.lambda0();
  const Weight diff = y - x;
  double lhs = lognorm - quad(wx.bar(), wy.bar()).get_d();
  double rhs = alg.inner(apply(alg, w, diff) - diff, h_lambda0).get_d() + lognorm - quad(x.bar(), y.bar()).get_d();
  return std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
}

double harmonic_residual(const AffineAlgebra& alg, const AffineWeylElement& w, const SpaceTimePoint& p, double step) {
  if (!(step > 0)) throw DomainError("harmonic_residual: step must be > 0");
  SpaceTime st(alg);
  const Weight& rho = alg.rho();
  Weight d = apply(alg, w, rho) - rho;
  const RealVector v = to_real(d.z);
  const double b = d.b.get_d();
  const RealMatrix& G = alg.finite_gram_real();
  auto expo = [&](const SpaceTimePoint& q) { return dot(mv(G, st.to_root(q.z)), v) + q.s * b; };
  const double e0 = expo(p);
  auto ratio = [&](double ds, std::size_t i, double dz) {
    SpaceTimePoint q = p;
    q.s += ds;
    if (dz != 0) q.z[i] += dz;
    return std::exp(expo(q) - e0);
  };
  const std::size_t l = alg.rank();
  double lap = 0, drift = 0;
  for (std::size_t i = 0; i < l; ++i) {
    double up = ratio(0, i, step), dn = ratio(0, i, -step);
    lap += (up - 2.0 + dn) / (step * step);
    drift += st.rho()[i] * (up - dn) / (2 * step);
  }
  double ds = (ratio(step, 0, 0) - ratio(-step, 0, 0)) / (2 * step);
  return 0.5 * lap + st.dual_coxeter() * ds + drift;
}

// ---------------------------------------------------------------- simulation

SampleSummary sample_paths(const SpaceTime& st, const SpaceTimePoint& x0, const SampleOptions& opt) {
  if (!(opt.dt > 0) || !(opt.t_max >= 0) || opt.n_paths <= 0) throw DomainError("sample_paths: bad options");
  const std::size_t l = st.rank();
  if (x0.z.size() != l) throw DomainError("sample_paths: dimension mismatch");
  if (opt.conditioned && st.chamber(x0).margin <= 0)
    throw DomainError("sample_paths: conditioned start must be strictly inside the chamber");
  const long steps = std::lround(opt.t_max / opt.dt);
  const double hv = st.dual_coxeter();
  const double dt_min = opt.dt / static_cast<double>(opt.dt_min_divisor);
  SampleSummary out;
  out.paths.resize(opt.n_paths);
  if (opt.coarse_monitor > 1) out.exited_coarse.assign(opt.n_paths, false);

  for (long pidx = 0; pidx < opt.n_paths; ++pidx) {
    auto g = make_stream(opt.seed, static_cast<std::uint64_t>(pidx));
    SpaceTimePath& path = out.paths[pidx];
    path.dt = opt.dt;
    path.seed = opt.seed;
    SpaceTimePoint x = x0;
    auto record = [&](long k) {
      if (opt.keep_points || std::binary_search(opt.record_steps.begin(), opt.record_steps.end(), k))
        path.points.push_back(x);
    };
    if (opt.keep_points) path.points.reserve(steps + 1);
    record(0);
    if (!opt.conditioned && st.chamber(x).margin < 0) path.exited_at = 0.0;
    for (long k = 0; k < steps; ++k) {
      if (!opt.conditioned) {
        for (std::size_t i = 0; i < l; ++i) x.z[i] += st.rho()[i] * opt.dt + std::sqrt(opt.dt) * standard_normal(g);
        x.s = x0.s + (k + 1) * hv * opt.dt;
        if (!path.exited_at && !st.chamber(x).inside) path.exited_at = (k + 1) * opt.dt;
        if (opt.coarse_monitor > 1 && (k + 1) % opt.coarse_monitor == 0 && !out.exited_coarse[pidx] &&
            !st.chamber(x).inside)
          out.exited_coarse[pidx] = true;
        if (!opt.keep_points && opt.record_steps.empty() && path.exited_at && (opt.coarse_monitor <= 1 || out.exited_coarse[pidx])) break;
      } else {
        double remaining = opt.dt;
        const double t_end = x0.s + (k + 1) * hv * opt.dt;
        while (remaining > 0 && !path.aborted) {
          double h = std::min(remaining, opt.dt);
          double margin = st.chamber(x).margin;
          while (margin < 10 * std::sqrt(h) && h / 2 >= dt_min) h /= 2;
          GradientResult gr = st.survival_gradient(x);
          RealVector noise(l);
          for (auto& e : noise) e = standard_normal(g);
          SpaceTimePoint nx;
          while (true) {
            nx = x;
            for (std::size_t i = 0; i < l; ++i)
              nx.z[i] += (st.rho()[i] + gr.dz[i] / gr.value) * h + std::sqrt(h) * noise[i];
            nx.s += hv * h;
            if (st.chamber(nx).margin > 0) break;
            if (h / 2 < dt_min) {
              path.aborted = true;
              path.exited_at = (k + 1) * opt.dt;
              break;
            }
            h /= 2;
            for (auto& e : noise) e = standard_normal(g);
          }
          if (path.aborted) break;
          if (h < opt.dt) ++path.refinements;
          x = nx;
          remaining -= h;
          if (remaining < 1e-15 * opt.dt) remaining = 0;
        }
        if (path.aborted) break;
        x.s = t_end;
      }
      record(k + 1);
    }
    out.refinements += path.refinements;
    out.aborted += path.aborted ? 1 : 0;
  }
  return out;
}

std::vector<SpaceTimePath> sample_paths(const AffineAlgebra& alg, const SpaceTimePoint& x0, double t_max, double dt,
                                        long n_paths, std::uint64_t seed, bool conditioned) {
  SpaceTime st(alg);
  SampleOptions opt;
  opt.t_max = t_max;
  opt.dt = dt;
  opt.n_paths = n_paths;
  opt.seed = seed;
  opt.conditioned = conditioned;
  return sample_paths(st, x0, opt).paths;
}

ExitEstimate exit_probability(const SpaceTime& st, const SpaceTimePoint& x0, double t_max, double dt, long n_paths,
                              std::uint64_t seed) {
  SampleOptions opt;
  opt.t_max = t_max;
  opt.dt = dt;
  opt.n_paths = n_paths;
  opt.seed = seed;
  opt.keep_points = false;
  opt.coarse_monitor = 4;
  SampleSummary s = sample_paths(st, x0, opt);
  ExitEstimate e;
  e.n = n_paths;
  double sum = 0, sum2 = 0, fine = 0, coarse = 0;
  for (long i = 0; i < n_paths; ++i) {
    double f = s.paths[i].exited_at ? 1.0 : 0.0;
    double c = s.exited_coarse[i] ? 1.0 : 0.0;
    double v = 2 * f - c;
    fine += f;
    coarse += c;
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(n_paths);
  e.p_fine = fine / n;
  e.p_coarse = coarse / n;
  e.p_extrapolated = sum / n;
  e.se_extrapolated = std::sqrt(std::max(0.0, (sum2 / n - e.p_extrapolated * e.p_extrapolated) / (n - 1)));
  return e;
}

double survival_quadrature(const SpaceTime& st, const SpaceTimePoint& x0, double t, long nodes) {
  const AffineAlgebra& alg = st.algebra();
  const std::size_t l = st.rank();
  const double sy = x0.s + t * st.dual_coxeter();
  // slice of the chamber at level sy: simplex with vertices 0 and sy * fundamental_i / comark_i
  std::vector<RealVector> verts{RealVector(l, 0.0)};
  for (std::size_t i = 1; i <= l; ++i) {
    Weight f = alg.fundamental(i);
    RealVector r = to_real(f.z);
    for (auto& v : r) v *= sy / static_cast<double>(alg.comarks()[i]);
    verts.push_back(st.to_ortho(r));
  }
  RealVector lo(l, 1e300), hi(l, -1e300);
  for (const auto& v : verts)
    for (std::size_t i = 0; i < l; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  if (nodes % 2) ++nodes;
  std::vector<long> idx(l, 0);
  double total = 0;
  const long npts = nodes + 1;
  long count = 1;
  for (std::size_t i = 0; i < l; ++i) count *= npts;
  RealVector hstep(l);
  for (std::size_t i = 0; i < l; ++i) hstep[i] = (hi[i] - lo[i]) / nodes;
  for (long c = 0; c < count; ++c) {
    long rem = c;
    double wgt = 1;
    SpaceTimePoint y{sy, RealVector(l)};
    for (std::size_t i = 0; i < l; ++i) {
      long j = rem % npts;
      rem /= npts;
      y.z[i] = lo[i] + j * hstep[i];
      wgt *= (j == 0 || j == nodes) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      wgt *= hstep[i] / 3.0;
    }
    if (st.chamber(y).margin <= 0) continue;
    total += wgt * st.reflected_density(x0, y, t, DensityMode::drifted_by_x).value;
  }
  return total;
}

}  // namespace affine
