#include "affine/chain.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "affine/error.hpp"
#include "affine/highest_weight.hpp"
#include "affine/rng.hpp"
#include "affine/weyl.hpp"

namespace affine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_bigint(const BigInt& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

double dot(const RealVector& a, const RealVector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RealVector real_mat_vec(const RealMatrix& m, const RealVector& v) {
  RealVector out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

// box representatives of Z^l / (row span of an upper triangular HNF)
std::vector<IntVector> box_representatives(const IntMatrix& h) {
  const std::size_t l = h.size();
  std::vector<IntVector> out{IntVector(l, 0)};
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<IntVector> next;
    for (const auto& v : out)
      for (long c = 0; c < h[i][i]; ++c) {
        IntVector w = v;
        w[i] = c;
        next.push_back(w);
      }
    out.swap(next);
  }
  return out;
}

void require_positive_level(const Weight& omega) {
  if (!(omega.k > 0)) throw DomainError("omega must have positive level");
}

}  // namespace

double DiscreteDistribution::mass() const {
  double s = 0;
  for (const auto& e : support) s += e.second;
  return s;
}

double KernelRow::mass() const {
  double s = 0;
  for (const auto& e : entries) s += e.second;
  return s;
}

// ---------------------------------------------------------------- truncated laws

DiscreteDistribution mu_omega(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, long depth) {
  require_untwisted_dominant(alg, omega, "mu_omega");
  if (depth < 0) throw DomainError("mu_omega: depth must be >= 0");
  MultiplicityTable t = freudenthal_table(alg, omega, depth);
  EvalResult ch = eval_character_closed(alg, omega, s);
  DiscreteDistribution out;
  for (long d = 0; d <= depth; ++d)
    for (const auto& [o, m] : t.layer(d)) {
      Weight w = t.weight(d, o);
      double p = std::exp(log_bigint(m) + pair(alg, w, s) - ch.log_value);
      out.support.emplace_back(std::move(w), p);
    }
  out.defect = std::max(0.0, 1.0 - out.mass());
  return out;
}

KernelRow aggregate_mod_delta(const KernelRow& row) {
  std::map<Weight, double> acc;
  for (const auto& [w, p] : row.entries) acc[w.bar()] += p;
  KernelRow out;
  out.from = row.from.bar();
  out.defect = row.defect;
  for (auto& [w, p] : acc) out.entries.emplace_back(w, p);
  return out;
}

KernelRow q_omega_row(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, const Specialization& s,
                      long depth) {
  require_untwisted_dominant(alg, lambda, "q_omega_row");
  require_untwisted_dominant(alg, omega, "q_omega_row");
  require_positive_level(omega);
  if (depth < 0) throw DomainError("q_omega_row: depth must be >= 0");

  MultiplicityTable prod =
      multiply_tables(freudenthal_table(alg, lambda, depth), freudenthal_table(alg, omega, depth), depth);
  std::vector<Weight> candidates;
  long need = 0;
  for (long d = 0; d <= depth; ++d)
    for (const auto& entry : prod.layer(d)) {
      Weight b = prod.weight(d, entry.first);
      if (!alg.is_dominant_integral(b)) continue;
      need = std::max(need, branching_required_depth(alg, lambda, omega, 1, b));
      candidates.push_back(std::move(b));
    }
  MultiplicityTable tab = tensor_power_table(alg, omega, 1, need);

  BarredKernel kernel(alg, omega, s);
  const double log_a_rho = kernel.log_alt(alg.rho());
  auto log_ch = [&](const Weight& mu) { return pair(alg, mu, s) + kernel.log_alt(mu + alg.rho()) - log_a_rho; };
  const double base = log_ch(lambda) + log_ch(omega);

  KernelRow row;
  row.from = lambda;
  for (const auto& b : candidates) {
    BigInt m = branching_mult(alg, tab, lambda, omega, 1, b);
    if (m < 0) throw ConsistencyError("q_omega_row: negative branching multiplicity at " + b.to_string());
    if (m == 0) continue;
    row.entries.emplace_back(b, std::exp(log_bigint(m) + log_ch(b) - base));
  }
  const KernelRow& full = kernel.row(lambda);
  row.defect = std::max(0.0, full.mass() + kernel.law().tail() - row.mass());
  return row;
}

double pbar_power(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, long n_steps,
                  const Weight& lambda0, const Weight& beta0, long depth) {
  require_untwisted_dominant(alg, omega, "pbar_power");
  if (n_steps < 0) throw DomainError("pbar_power: n_steps must be >= 0");
  alg.check_weight(lambda0);
  alg.check_weight(beta0);
  if (beta0.k != lambda0.k + Rational(n_steps) * omega.k) return 0.0;
  MultiplicityTable tab = tensor_power_table(alg, omega, n_steps, depth);
  const Weight gamma0 = (beta0 - lambda0).bar();
  long d0 = 0;
  IntVector o;
  if (!tab.key_of(gamma0, d0, o)) return 0.0;
  const double log_ch = eval_character_closed(alg, omega, s).log_value;
  double total = 0;
  // every weight gamma0 + j delta of the table with the same finite offset
  for (long d = 0; d <= depth; ++d) {
    auto it = tab.layer(d).find(o);
    if (it == tab.layer(d).end()) continue;
    Weight g = tab.weight(d, o);
    total += std::exp(log_bigint(it->second) + pair(alg, g, s) - n_steps * log_ch);
  }
  return total;
}

// ---------------------------------------------------------------- barred increment law

IncrementLaw::IncrementLaw(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, double log_tol) {
  require_untwisted_dominant(alg, omega, "IncrementLaw");
  require_positive_level(omega);
  const WeylGroup& W = alg.weyl();
  const std::size_t l = alg.rank();
  const long k = to_long_exact(omega.k);
  const double kp = s.point.k.get_d();
  const RealMatrix& G = alg.finite_gram_real();
  omega_z_ = to_real(omega.z);
  const RealVector p = to_real(s.point.z);

  // classes of Q / kM and the dual group
  IntMatrix kb = W.lattice_basis();
  for (auto& row : kb)
    for (auto& x : row) x *= k;
  const IntMatrix h = hermite_normal_form(kb);
  class_rep_ = box_representatives(h);
  IntMatrix ht(l, IntVector(l));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) ht[i][j] = h[j][i];
  const RationalMatrix h_inv = inverse(to_rational(h));
  const RationalMatrix g_inv = inverse(alg.finite_gram());
  std::vector<RationalVector> duals;  // y = h^{-1} m, the values (alpha_i|u)
  for (const auto& m : box_representatives(hermite_normal_form(ht))) duals.push_back(mat_vec(h_inv, to_rational(m)));

  const std::size_t nc = class_rep_.size();
  std::vector<std::complex<double>> chi(duals.size());
  double chi_err = 0;
  for (std::size_t a = 0; a < duals.size(); ++a) {
    bool trivial = std::all_of(duals[a].begin(), duals[a].end(), [](const Rational& q) { return q == 0; });
    if (trivial) {
      chi[a] = 1.0;
      continue;
    }
    RationalVector u = mat_vec(g_inv, duals[a]);
    TwistedRatio r = twisted_character_ratio(alg, omega, s, u);
    // offsets are measured from barbar(omega)
    Rational shift = alg.finite_inner(omega.z, u);
    double ph = -2 * M_PI * Rational(shift - Rational(floor(shift.get_d()))).get_d();
    chi[a] = r.value * std::complex<double>(std::cos(ph), std::sin(ph));
    chi_err = std::max(chi_err, r.abs_error);
  }
  class_mass_.assign(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    std::complex<double> acc = 0;
    for (std::size_t a = 0; a < duals.size(); ++a) {
      Rational e = 0;
      for (std::size_t i = 0; i < l; ++i) e += Rational(class_rep_[c][i]) * duals[a][i];
      double ph = -2 * M_PI * Rational(e - Rational(floor(e.get_d()))).get_d();
      acc += chi[a] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    class_mass_[c] = std::max(0.0, acc.real() / static_cast<double>(nc));
  }
  const double class_err = chi_err + 1e-15;

  // profile exp((zeta|p) - kp |zeta|^2 / 2k) on each class c + kM
  center_.assign(l, 0.0);
  for (std::size_t i = 0; i < l; ++i) center_[i] = k * p[i] / kp;
  const double a = 0.5 * k * kp;
  const RationalMatrix basis_inv = inverse(to_rational(W.lattice_basis()));
  RealMatrix binv_real = to_real(basis_inv);
  auto expo = [&](const RealVector& zeta) {
    RealVector gz = real_mat_vec(G, zeta);
    return dot(gz, p) - kp * dot(gz, zeta) / (2.0 * k);
  };
  struct Pending {
    IntVector offset;
    double log_profile;
    std::size_t cls;
  };
  std::vector<Pending> pending;
  std::vector<double> log_theta(nc, kNegInf), log_tail(nc, kNegInf);
  for (std::size_t c = 0; c < nc; ++c) {
    if (class_mass_[c] <= 0) continue;
    RealVector zc(l);
    for (std::size_t i = 0; i < l; ++i) zc[i] = omega_z_[i] + class_rep_[c][i];
    // nearest lattice point to the profile center, alpha* = (center - zc)/k
    RealVector astar(l), coords(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) astar[i] = (center_[i] - zc[i]) / k;
    for (std::size_t r = 0; r < l; ++r)
      for (std::size_t i = 0; i < l; ++i) coords[r] += astar[i] * binv_real[i][r];
    IntVector near(l);
    for (std::size_t r = 0; r < l; ++r) near[r] = std::lround(coords[r]);
    IntVector a0 = W.to_root_coords(near);
    RealVector z0(l);
    for (std::size_t i = 0; i < l; ++i) z0[i] = zc[i] + k * static_cast<double>(a0[i]);
    // exponent at z0 + k beta is expo(z0) + (g|beta) - a|beta|^2
    const double c0 = expo(z0);
    RealVector gvec(l);
    for (std::size_t i = 0; i < l; ++i) gvec[i] = k * p[i] - kp * z0[i];
    const double gn = std::sqrt(std::max(0.0, dot(real_mat_vec(G, gvec), gvec) / 1.0));
    const double radius = gaussian_tail_radius(W, a, gn, c0, c0 + log_tol);
    log_tail[c] = gaussian_tail_log(W, a, gn, c0, radius);
    for (const auto& lc : W.lattice_ball(radius)) {
      IntVector beta = W.to_root_coords(lc);
      IntVector off(l);
      RealVector zeta(l);
      for (std::size_t i = 0; i < l; ++i) {
        off[i] = class_rep_[c][i] + k * (a0[i] + beta[i]);
        zeta[i] = omega_z_[i] + off[i];
      }
      double e = expo(zeta);
      log_theta[c] = log_add(log_theta[c], e);
      pending.push_back({off, e, c});
      RealVector dz(l);
      for (std::size_t i = 0; i < l; ++i) dz[i] = zeta[i] - center_[i];
      support_radius_ = std::max(support_radius_, std::sqrt(dot(real_mat_vec(G, dz), dz)));
    }
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& x, const Pending& y) { return x.offset < y.offset; });
  double acc = 0;
  for (const auto& pe : pending) {
    double pr = class_mass_[pe.cls] * std::exp(pe.log_profile - log_theta[pe.cls]);
    index_[pe.offset] = offsets_.size();
    offsets_.push_back(pe.offset);
    probs_.push_back(pr);
    acc += pr;
    cdf_.push_back(acc);
  }
  for (std::size_t c = 0; c < nc; ++c)
    if (class_mass_[c] > 0) tail_ += class_mass_[c] * std::exp(log_tail[c] - log_theta[c]);
  abs_error_ = class_err;
  tail_ += class_err * static_cast<double>(nc);
}

double IncrementLaw::probability(const IntVector& offset) const {
  auto it = index_.find(offset);
  return it == index_.end() ? 0.0 : probs_[it->second];
}

RealVector IncrementLaw::mean() const {
  RealVector m(omega_z_.size(), 0.0);
  for (std::size_t j = 0; j < offsets_.size(); ++j)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += probs_[j] * (omega_z_[i] + offsets_[j][i]);
  return m;
}

std::size_t IncrementLaw::sample(std::mt19937_64& g) const {
  double u = uniform01(g);
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) throw TruncationError("increment draw landed in the truncated mass");
  return static_cast<std::size_t>(it - cdf_.begin());
}

// ---------------------------------------------------------------- barred kernel

BarredKernel::BarredKernel(const AffineAlgebra& alg, Weight omega, Specialization s, double log_tol)
    : alg_(alg), omega_(std::move(omega)), s_(std::move(s)), law_(alg_, omega_, s_, log_tol) {
  p_ = to_real(s_.point.z);
  kp_ = s_.point.k.get_d();
}

const std::vector<RealVector>& BarredKernel::ball(double radius) const {
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

double BarredKernel::log_alt_fast(const RealVector& zbar, double level, bool& ok) const {
  const WeylGroup& W = alg_.weyl();
  const RealMatrix& G = alg_.finite_gram_real();
  const double a = 0.5 * kp_ * level;
  struct Part {
    int sign;
    double c;
    RealVector g;  // G-contracted linear coefficient
    double gn;
  };
  std::vector<Part> parts;
  double gmax = 0, cmax = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < W.order(); ++w) {
    RealVector v = real_mat_vec(W.real_matrix(w), zbar);
    RealVector shift(v.size()), g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      shift[i] = v[i] - zbar[i];
      g[i] = level * p_[i] - kp_ * v[i];
    }
    Part pt{W.finite()[w].sign, dot(real_mat_vec(G, shift), p_), real_mat_vec(G, g), 0};
    pt.gn = std::sqrt(std::max(0.0, dot(pt.g, g)));
    gmax = std::max(gmax, pt.gn);
    cmax = std::max(cmax, pt.c);
    parts.push_back(std::move(pt));
  }
  // one bound with the largest linear and constant coefficients covers every part
  const double radius = gaussian_tail_radius(W, a, gmax, cmax, -45.0);
  const auto& pts = ball(radius);
  double sum = 0, l1 = 0;
  for (const auto& pt : parts) {
    for (const auto& al : pts) {
      double e = pt.c + dot(pt.g, al) - a * dot(real_mat_vec(G, al), al);
      double t = std::exp(e);
      sum += pt.sign * t;
      l1 += t;
    }
  }
  const double tail = static_cast<double>(parts.size()) * std::exp(gaussian_tail_log(W, a, gmax, cmax, radius));
  double err = 8.0 * static_cast<double>(pts.size() * parts.size()) * 1.1e-16 * l1 + tail;
  ok = sum > 0 && err <= 1e-11 * sum;
  return ok ? std::log(sum) : 0.0;
}

double BarredKernel::log_alt(const Weight& big) const {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  Weight key = big.bar();
  auto it = alt_.find(key);
  if (it != alt_.end()) return it->second;
  bool ok = false;
  double v = log_alt_fast(to_real(key.z), key.k.get_d(), ok);
  if (!ok) v = alternating_sum(alg_, key, s_, nullptr, 1e-15).log_abs;
  alt_.emplace(std::move(key), v);
  return v;
}

const BarredKernel::Cached& BarredKernel::cached(const Weight& lambda_in) const {
  std::lock_guard<std::recursive_mutex> lock(mutex_);
  Weight lambda = lambda_in.bar();
  auto it = rows_.find(lambda);
  if (it != rows_.end()) return *it->second;
  require_untwisted_dominant(alg_, lambda, "BarredKernel::row");

  const WeylGroup& W = alg_.weyl();
  const RealMatrix& G = alg_.finite_gram_real();
  const std::size_t l = alg_.rank();
  const Weight& rho = alg_.rho();
  const double log_a_lambda = log_alt(lambda + rho);
  const Rational level = lambda.k + omega_.k;
  const double K = Rational(level + rho.k).get_d();
  RealVector zl(l);  // barbar(lambda + rho)
  for (std::size_t i = 0; i < l; ++i) zl[i] = Rational(lambda.z[i] + rho.z[i]).get_d();
  const double supp = law_.support_radius();
  const RealVector& ctr = law_.center();
  const IntMatrix& cart = alg_.finite_cartan();

  auto out = std::make_unique<Cached>();
  out->row.from = lambda;
  for (const auto& q : law_.offsets()) {
    RationalVector bz(l);
    RealVector zb(l);  // barbar(beta + rho)
    for (std::size_t i = 0; i < l; ++i) {
      bz[i] = lambda.z[i] + omega_.z[i] + Rational(q[i]);
      zb[i] = Rational(bz[i] + rho.z[i]).get_d();
    }
    // dominance: beta + rho has all pairings >= 1
    bool dominant = true;
    double s0 = 0;
    for (std::size_t i = 0; i < l && dominant; ++i) {
      double pr = 0;
      for (std::size_t j = 0; j < l; ++j) pr += cart[i][j] * zb[j];
      if (pr < 1 - 1e-9) dominant = false;
    }
    if (!dominant) continue;
    {
      // alpha_0 pairing = K - sum_i a_i^vee (alpha_i^vee pairing); with a_0^vee = 1
      for (std::size_t i = 0; i < l; ++i) {
        double pr = 0;
        for (std::size_t j = 0; j < l; ++j) pr += cart[i][j] * zb[j];
        s0 += alg_.comarks()[i + 1] * pr;
      }
      if (K - s0 < 1 - 1e-9) continue;
    }
    double sum = 0;
    for (std::size_t w = 0; w < W.order(); ++w) {
      RealVector v = real_mat_vec(W.real_matrix(w), zb);
      RealVector dv(l);
      for (std::size_t i = 0; i < l; ++i) dv[i] = v[i] - zl[i] - ctr[i];
      double reach = (supp + std::sqrt(std::max(0.0, dot(real_mat_vec(G, dv), dv)))) / K + 1e-9;
      const int sg = W.finite()[w].sign;
      for (const auto& al : ball(reach)) {
        IntVector qw(l);
        bool integral = true;
        for (std::size_t i = 0; i < l; ++i) {
          double x = q[i] + (v[i] - zb[i]) + K * al[i];
          qw[i] = std::lround(x);
          if (std::fabs(x - qw[i]) > 1e-6) integral = false;
        }
        if (!integral) throw ConsistencyError("barred kernel: reflected increment is not integral");
        double pr = law_.probability(qw);
        if (pr == 0) continue;
        RealVector diff(l);
        for (std::size_t i = 0; i < l; ++i) diff[i] = zb[i] - v[i] - K * al[i];
        RealVector gal = real_mat_vec(G, al);
        double e = dot(real_mat_vec(G, diff), p_) + kp_ * (dot(gal, v) + 0.5 * K * dot(gal, al));
        sum += sg * std::exp(e) * pr;
      }
    }
    if (sum == 0) continue;
    Weight beta(level, bz, 0);
    double qv = std::exp(log_alt(beta + rho) - log_a_lambda) * sum;
    if (qv < 0) {
      if (qv < -1e-10) throw ConsistencyError("barred kernel: negative entry at " + beta.to_string());
      continue;
    }
    out->row.entries.emplace_back(std::move(beta), qv);
  }
  double acc = 0;
  for (const auto& e : out->row.entries) {
    acc += e.second;
    out->cdf.push_back(acc);
  }
  out->row.defect = std::max(0.0, 1.0 - acc);
  return *rows_.emplace(std::move(lambda), std::move(out)).first->second;
}

const KernelRow& BarredKernel::row(const Weight& lambda) const { return cached(lambda).row; }

Weight BarredKernel::step(const Weight& from, std::mt19937_64& g, double max_defect) const {
  const Cached& c = cached(from);
  if (c.row.defect > max_defect)
    throw TruncationError("barred kernel row defect " + std::to_string(c.row.defect) + " above threshold at " +
                          from.to_string());
  double u = uniform01(g);
  auto it = std::lower_bound(c.cdf.begin(), c.cdf.end(), u);
  if (it == c.cdf.end()) throw TruncationError("chain draw landed in the row defect at " + from.to_string());
  return c.row.entries[static_cast<std::size_t>(it - c.cdf.begin())].first;
}

std::vector<Weight> simulate_chain(const BarredKernel& kernel, const Weight& start, long steps, std::mt19937_64& g) {
  if (steps < 0) throw DomainError("simulate_chain: steps must be >= 0");
  require_untwisted_dominant(kernel.algebra(), start, "simulate_chain");
  std::vector<Weight> path{start.bar()};
  path.reserve(steps + 1);
  for (long i = 0; i < steps; ++i) path.push_back(kernel.step(path.back(), g));
  return path;
}

std::vector<Weight> simulate_chain(const AffineAlgebra& alg, const Weight& start, const Weight& omega,
                                   const Specialization& s, long steps, std::uint64_t seed) {
  BarredKernel kernel(alg, omega, s);
  auto g = make_stream(seed, 0);
  return simulate_chain(kernel, start, steps, g);
}

// ---------------------------------------------------------------- reflection principle

ReflectionReport reflection_check(const AffineAlgebra& alg, const Weight& omega, const Specialization& s,
                                  long n_steps, const Weight& lambda0_in, const Weight& beta0_in, long depth) {
  require_untwisted_dominant(alg, omega, "reflection_check");
  require_positive_level(omega);
  require_untwisted_dominant(alg, lambda0_in, "reflection_check");
  require_untwisted_dominant(alg, beta0_in, "reflection_check");
  if (n_steps < 0 || depth < 0) throw DomainError("reflection_check: n_steps and depth must be >= 0");
  const Weight lambda0 = lambda0_in.bar(), beta0 = beta0_in.bar();
  if (beta0.k != lambda0.k + Rational(n_steps) * omega.k)
    throw DomainError("reflection_check: level(beta0) must equal level(lambda0) + n level(omega)");
  const Weight& rho = alg.rho();
  const Weight delta = alg.delta();
  const Weight top = lambda0 + Rational(n_steps) * omega;
  MultiplicityTable frame(top, depth, "frame");
  long d0 = 0;
  IntVector o0;
  ReflectionReport rep;
  rep.depth = depth;
  if (!frame.key_of(beta0, d0, o0) || d0 < 0) return rep;  // unreachable: both sides vanish
  const double kp = s.point.k.get_d();

  // left side: components beta0 + j delta from dividing characters, j in [d0 - depth, d0]
  double lhs_sum = 0;
  for (const auto& t : branching_by_division(alg, lambda0, omega, n_steps, depth)) {
    if (t.highest.bar() != beta0) continue;
    double j = Rational(t.highest.b - beta0.b).get_d();
    lhs_sum += std::exp(log_bigint(t.mult) + j * kp);
  }
  const double eps = 1e-15;
  double lhs_pref = eval_character(alg, beta0, s, eps).log_value - eval_character(alg, lambda0, s, eps).log_value -
                    n_steps * eval_character(alg, omega, s, eps).log_value;
  rep.lhs = std::exp(lhs_pref) * lhs_sum;

  // right side: sum over w of det(w) e^{(w L - L|p)} Pbar^n(bar(w L - rho), beta0), L = lambda0 + rho,
  // restricted to the same components beta0 + j delta
  const Weight big = lambda0 + rho;
  const Weight tensor_top = Rational(n_steps) * omega;
  MultiplicityTable tframe(tensor_top, 0, "frame");
  const Rational bound = alg.inner(tensor_top + rho, tensor_top + rho);
  struct Record {
    int sign;
    double log_w;  // (wL - L|p)
    long d;
    IntVector o;
    Weight gamma;
  };
  std::vector<Record> records;
  const WeylGroup& W = alg.weyl();
  double shell = 0.5;
  double radius = W.covering_radius();
  long quiet = 0, need = 0;
  std::map<std::pair<IntVector, std::size_t>, bool> seen;
  while (quiet < 2) {
    bool any = false;
    for (const auto& w : enumerate_bounded(alg, radius)) {
      auto key = std::make_pair(w.translation, w.finite);
      if (seen.count(key)) continue;
      seen[key] = true;
      Weight wl = apply(alg, w, big);
      Weight y = wl - rho;
      Weight xw = y.bar();
      const Rational bw = y.b;
      for (long jj = d0 - depth; jj <= d0; ++jj) {
        Weight gamma = beta0 + (Rational(jj) - bw) * delta - xw;
        long d = 0;
        IntVector o;
        if (!tframe.key_of(gamma, d, o) || d < 0) continue;
        if (alg.inner(gamma + rho, gamma + rho) > bound) continue;
        any = true;
        need = std::max(need, d);
        records.push_back({sign(alg, w), pair(alg, wl - big, s), d, o, gamma});
      }
    }
    quiet = any ? 0 : quiet + 1;
    radius += shell + W.covering_radius();
    if (radius > 1e4) throw CapExceededError("reflection_check: Weyl sum does not close");
  }
  MultiplicityTable tab = tensor_power_table(alg, omega, n_steps, need);
  const double log_ch_omega = eval_character_closed(alg, omega, s).log_value;
  double rhs_sum = 0;
  for (const auto& r : records) {
    auto it = tab.layer(r.d).find(r.o);
    if (it == tab.layer(r.d).end()) continue;
    double pbar = std::exp(log_bigint(it->second) + pair(alg, r.gamma, s) - n_steps * log_ch_omega);
    rhs_sum += r.sign * std::exp(r.log_w) * pbar;
    ++rep.weyl_terms;
  }
  AlternatingSum ab = alternating_sum(alg, beta0 + rho, s, nullptr, 1e-15);
  AlternatingSum al = alternating_sum(alg, big, s, nullptr, 1e-15);
  rep.rhs = std::exp(ab.log_abs - al.log_abs) * rhs_sum;
  rep.table_depth = need;
  rep.residual = rep.lhs > 0 ? std::fabs(rep.lhs - rep.rhs) / rep.lhs : std::fabs(rep.rhs);
  return rep;
}

double reflection_discrete_residual(const AffineAlgebra& alg, const Weight& omega, const Specialization& s,
                                    long n_steps, const Weight& lambda0, const Weight& beta0, long depth) {
  return reflection_check(alg, omega, s, n_steps, lambda0, beta0, depth).residual;
}

}  // namespace affine
