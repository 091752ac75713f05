#include "affine/characters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affine/error.hpp"
#include "affine/highest_weight.hpp"
#include "affine/weyl.hpp"

namespace affine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_bigint(const BigInt& z) {
  if (z == 0) return kNegInf;
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

double safe_exp(double x) { return x > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(x); }

void require_convergent(const Specialization& s) {
  if (!(s.point.k > 0)) throw DomainError("specialization does not converge: (delta|point) must be > 0");
}

}  // namespace

Specialization make_specialization(const AffineAlgebra& alg, Weight point, std::string description) {
  alg.check_weight(point);
  Specialization s{std::move(point), std::move(description)};
  require_convergent(s);
  return s;
}

Specialization rho_specialization(const AffineAlgebra& alg, long n) {
  if (n <= 0) throw DomainError("rho_specialization: n must be >= 1");
  return make_specialization(alg, Rational(1, n) * alg.rho(), "rho/" + std::to_string(n));
}

Rational pair_exact(const AffineAlgebra& alg, const Weight& mu, const Specialization& s) {
  return alg.inner(mu, s.point);
}

double pair(const AffineAlgebra& alg, const Weight& mu, const Specialization& s) {
  return pair_exact(alg, mu, s).get_d();
}

// ---------------------------------------------------------------- series

EvalResult eval_character_at_depth(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                   long depth) {
  require_convergent(s);
  MultiplicityTable t = freudenthal_table(alg, lambda, depth);
  const std::size_t l = alg.rank();
  const double kp = s.point.k.get_d();
  // (o|p) for unit offsets
  RealVector unit(l);
  for (std::size_t i = 0; i < l; ++i) {
    RationalVector e(l);
    e[i] = 1;
    unit[i] = alg.finite_inner(e, s.point.z).get_d();
  }
  std::vector<double> log_layer(depth + 1, kNegInf);
  for (long d = 0; d <= depth; ++d)
    for (const auto& [o, m] : t.layer(d)) {
      double e = -d * kp;
      for (std::size_t i = 0; i < l; ++i) e += o[i] * unit[i];
      log_layer[d] = log_add(log_layer[d], log_bigint(m) + e);
    }
  double log_total = kNegInf;
  for (double x : log_layer) log_total = log_add(log_total, x);

  // geometric tail from the last layer ratios, certified only when they are decreasing
  double log_tail = std::numeric_limits<double>::infinity();
  if (depth >= 3) {
    double r1 = log_layer[depth] - log_layer[depth - 1];
    double r2 = log_layer[depth - 1] - log_layer[depth - 2];
    double r3 = log_layer[depth - 2] - log_layer[depth - 3];
    if (std::isinf(log_layer[depth]) && std::isinf(log_layer[depth - 1])) {
      log_tail = kNegInf;
    } else if (r1 < 0 && r1 <= r2 + 1e-12 && r2 <= r3 + 1e-12) {
      double r = std::exp(r1);
      log_tail = std::log(2.0) + log_layer[depth] + r1 - std::log1p(-r);
    }
  }
  const double base = pair(alg, lambda, s);
  EvalResult out;
  out.log_value = base + log_total;
  out.value = safe_exp(out.log_value);
  out.truncation_depth = depth;
  out.tail_bound = std::isinf(log_tail) ? (log_tail > 0 ? log_tail : 0.0) : safe_exp(base + log_tail);
  out.method = "series";
  return out;
}

EvalResult eval_character(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps,
                          long depth_cap) {
  require_convergent(s);
  if (!(eps > 0)) throw DomainError("eval_character: eps must be > 0");
  long depth = 12;
  while (true) {
    EvalResult r = eval_character_at_depth(alg, lambda, s, std::min(depth, depth_cap));
    if (r.tail_bound <= eps * r.value) return r;
    if (depth >= depth_cap)
      throw TruncationError("eval_character: accuracy " + std::to_string(eps) + " unreachable within depth cap " +
                            std::to_string(depth_cap) + " at " + s.description);
    depth = depth + depth / 2;
  }
}

// ---------------------------------------------------------------- alternating sums

namespace {

struct FinitePart {
  int sign;
  RationalVector shift;  // w0 Lambda - Lambda (finite part)
  RationalVector g;      // K p - k_p w0 Lambda
  Rational c;            // (w0 Lambda - Lambda | p)
  Rational phase0;       // (w0 Lambda - Lambda | u)
  double g_norm;
};

// log of the denominator product at a real point; |A_{lambda+rho}| >= this for dominant lambda,
// and the twisted denominator is bounded below by it as well
double log_denominator_product(const AffineAlgebra& alg, const Specialization& s) {
  if (!alg.untwisted()) return 0;
  const double kp = s.point.k.get_d();
  double total = 0;
  auto add_family = [&](double base, long m0, double mult) {
    for (long m = m0;; ++m) {
      double x = base + m * kp;
      if (x <= 0) continue;
      double t = std::log1p(-std::exp(-x));
      total += mult * t;
      if (m > m0 && -t < 1e-18 * std::max(1.0, std::fabs(total))) break;
    }
  };
  for (const auto& root : alg.positive_finite_roots()) {
    double ap = alg.finite_inner(to_rational(root), s.point.z).get_d();
    add_family(ap, 0, 1.0);
    add_family(-ap, 1, 1.0);
  }
  add_family(0.0, 1, static_cast<double>(alg.rank()));
  return total;
}

bool shifted_dominant(const AffineAlgebra& alg, const Weight& big) {
  if (!alg.untwisted()) return false;
  Weight lam = big - alg.rho();
  for (const auto& x : alg.pairings(lam))
    if (x < 0 || !is_integer(x)) return false;
  return true;
}

AlternatingSum alternating_sum_impl(const AffineAlgebra& alg, const Weight& big, const Specialization& s,
                                    const RationalVector* u, double rel_tol, double log_abs_floor) {
  require_convergent(s);
  alg.check_weight(big);
  if (!(big.k > 0)) throw DomainError("alternating_sum: weight must have positive level");
  const WeylGroup& W = alg.weyl();
  const std::size_t l = alg.rank();
  const Rational K = big.k, kp = s.point.k;
  const Rational a = Rational(1, 2) * kp * K;
  const double a_d = a.get_d();

  std::vector<FinitePart> parts;
  for (std::size_t w = 0; w < W.order(); ++w) {
    Weight v = apply_finite(alg, w, big);
    FinitePart f;
    f.sign = W.finite()[w].sign;
    f.shift.resize(l);
    f.g.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
      f.shift[i] = v.z[i] - big.z[i];
      f.g[i] = K * s.point.z[i] - kp * v.z[i];
    }
    f.c = alg.finite_inner(f.shift, s.point.z);
    f.phase0 = u ? alg.finite_inner(f.shift, *u) : Rational(0);
    f.g_norm = std::sqrt(std::max(0.0, alg.finite_inner(f.g, f.g).get_d()));
    parts.push_back(std::move(f));
  }

  double log_s_est = 0;  // identity term is 1
  if (shifted_dominant(alg, big) && (u == nullptr || big == alg.rho()))
    log_s_est = std::min(0.0, log_denominator_product(alg, s)) - 1.0;
  long bits = 53;
  for (int iter = 0; iter < 40; ++iter) {
    double log_target = std::max(std::log(rel_tol) + log_s_est, log_abs_floor) - std::log(4.0);
    double log_tail_each = log_target - std::log(static_cast<double>(parts.size()));
    double radius = 0;
    for (const auto& f : parts)
      radius = std::max(radius, gaussian_tail_radius(W, a_d, f.g_norm, f.c.get_d(), log_tail_each));
    double log_tail = kNegInf;
    for (const auto& f : parts) log_tail = log_add(log_tail, gaussian_tail_log(W, a_d, f.g_norm, f.c.get_d(), radius));

    auto pts = W.lattice_ball(radius);
    struct Term {
      int sign;
      Rational e, phase;
    };
    std::vector<Term> terms;
    terms.reserve(pts.size() * parts.size());
    double log_l1 = kNegInf;
    double re_d = 0, im_d = 0, emax = kNegInf;
    for (const auto& c : pts) {
      RationalVector alpha = to_rational(W.to_root_coords(c));
      Rational a2 = alg.finite_inner(alpha, alpha);
      Rational au = u ? alg.finite_inner(alpha, *u) : Rational(0);
      for (const auto& f : parts) {
        Term t{f.sign, f.c + alg.finite_inner(f.g, alpha) - a * a2, f.phase0 + K * au};
        emax = std::max(emax, t.e.get_d());
        terms.push_back(std::move(t));
      }
    }
    for (const auto& t : terms) {
      double e = t.e.get_d();
      log_l1 = log_add(log_l1, e);
      double mag = std::exp(e - emax);
      double ph = 0;
      if (u) {
        Rational fr = t.phase;
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), fr.get_num_mpz_t(), fr.get_den_mpz_t());
        ph = 2 * M_PI * Rational(fr - Rational(fl)).get_d();
      }
      re_d += t.sign * mag * std::cos(ph);
      im_d += t.sign * mag * std::sin(ph);
    }
    const double n_terms = static_cast<double>(terms.size());
    double log_s_d = emax + 0.5 * std::log(re_d * re_d + im_d * im_d);
    double log_round_d = std::log(n_terms * 4.0) - 52 * std::log(2.0) + log_l1;

    AlternatingSum out;
    out.terms = static_cast<long>(terms.size());
    out.log_l1 = log_l1;
    bool tail_ok = log_tail <= std::max(std::log(rel_tol) + std::min(log_s_d, log_s_est), log_abs_floor) - std::log(4.0) + 1e-9;
    if (bits <= 53 && log_round_d <= std::max(std::log(rel_tol) + log_s_d, log_abs_floor) - std::log(4.0)) {
      if (!tail_ok) {
        log_s_est = log_s_d;
        continue;
      }
      out.bits = 53;
      out.value = MpComplex(MpFloat(std::exp(emax) * re_d, 64), MpFloat(std::exp(emax) * im_d, 64));
      if (!std::isfinite(std::exp(emax))) {
        MpFloat scale = MpFloat::exp(MpFloat(emax, 64));
        out.value = MpComplex(MpFloat(re_d, 64) * scale, MpFloat(im_d, 64) * scale);
      }
      out.log_abs = log_s_d;
      out.log_abs_error = log_add(log_round_d, log_tail);
      return out;
    }
    // multiprecision pass; bits from the observed cancellation
    double est = std::max(std::min(log_s_d, log_s_est), log_abs_floor);
    if (log_s_d < log_round_d) est = std::max(log_abs_floor, std::min(log_s_est, log_round_d - 20));
    long need = static_cast<long>(std::ceil((log_l1 - est - std::log(rel_tol) + std::log(4 * n_terms)) / std::log(2.0))) + 24;
    bits = std::max(bits + 32, need);
    MpComplex acc(bits);
    for (const auto& t : terms) {
      MpFloat mag = MpFloat::exp(MpFloat(t.e, bits));
      if (t.sign < 0) mag = -mag;
      if (u) {
        MpFloat cs(bits), sn(bits);
        MpFloat::cis_two_pi(t.phase, bits, cs, sn);
        acc.re += mag * cs;
        acc.im += mag * sn;
      } else {
        acc.re += mag;
      }
    }
    double log_s = acc.log_abs();
    double log_round = std::log(n_terms * 4.0) - (bits - 2) * std::log(2.0) + log_l1;
    double log_goal = std::max(std::log(rel_tol) + log_s, log_abs_floor) - std::log(4.0);
    if (log_round <= log_goal && log_tail <= log_goal + 1e-9) {
      out.value = acc;
      out.bits = bits;
      out.log_abs = log_s;
      out.log_abs_error = log_add(log_round, log_tail);
      return out;
    }
    log_s_est = std::isinf(log_s) ? log_abs_floor : log_s;
  }
  throw NumericalError("alternating_sum: precision control did not converge");
}

}  // namespace

AlternatingSum alternating_sum(const AffineAlgebra& alg, const Weight& big_lambda, const Specialization& s,
                               const RationalVector* u, double rel_tol) {
  return alternating_sum_impl(alg, big_lambda, s, u, rel_tol, kNegInf);
}

EvalResult eval_character_closed(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                 double rel_tol) {
  require_untwisted_dominant(alg, lambda, "eval_character_closed");
  AlternatingSum num = alternating_sum(alg, lambda + alg.rho(), s, nullptr, rel_tol * 0.25);
  AlternatingSum den = alternating_sum(alg, alg.rho(), s, nullptr, rel_tol * 0.25);
  if (num.value.re.sign() <= 0 || den.value.re.sign() <= 0)
    throw NumericalError("eval_character_closed: non-positive alternating sum");
  EvalResult out;
  out.log_value = pair(alg, lambda, s) + num.log_abs - den.log_abs;
  out.value = safe_exp(out.log_value);
  double rel = std::exp(num.log_abs_error - num.log_abs) + std::exp(den.log_abs_error - den.log_abs);
  out.tail_bound = out.value * rel * (1 + 2 * rel);
  out.truncation_depth = std::max(num.terms, den.terms);
  out.method = "weyl-kac";
  return out;
}

TwistedRatio twisted_character_ratio(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                     const RationalVector& u, double rel_tol) {
  require_untwisted_dominant(alg, lambda, "twisted_character_ratio");
  if (u.size() != alg.rank()) throw DomainError("twisted_character_ratio: u has wrong dimension");
  const Weight big = lambda + alg.rho();
  AlternatingSum n0 = alternating_sum(alg, big, s, nullptr, rel_tol);
  AlternatingSum d0 = alternating_sum(alg, alg.rho(), s, nullptr, rel_tol);
  AlternatingSum du = alternating_sum(alg, alg.rho(), s, &u, rel_tol);
  // |ratio| <= 1, so the numerator only needs absolute accuracy on the scale below
  double floor = std::log(rel_tol) + n0.log_abs + du.log_abs - d0.log_abs;
  AlternatingSum nu = alternating_sum_impl(alg, big, s, &u, rel_tol, floor);
  long bits = std::max({n0.bits, d0.bits, du.bits, nu.bits, 64L}) + 16;
  MpComplex num(MpFloat(nu.value.re), MpFloat(nu.value.im));
  MpComplex den(MpFloat(du.value.re), MpFloat(du.value.im));
  MpComplex ratio = num / den;
  // divide by n0/d0 in log space
  double log_scale = n0.log_abs - d0.log_abs;
  MpFloat scale = MpFloat::exp(MpFloat(-log_scale, bits));
  // the phase of e^{2 pi i (lambda|u)} from the prefactor
  MpFloat cs(bits), sn(bits);
  MpFloat::cis_two_pi(alg.finite_inner(lambda.z, u), bits, cs, sn);
  MpComplex phase(cs, sn);
  MpComplex r = ratio * phase;
  TwistedRatio out;
  out.value = {(r.re * scale).to_double(), (r.im * scale).to_double()};
  double rel_parts = std::exp(n0.log_abs_error - n0.log_abs) + std::exp(d0.log_abs_error - d0.log_abs) +
                     std::exp(du.log_abs_error - du.log_abs);
  out.abs_error = std::abs(out.value) * rel_parts + std::exp(nu.log_abs_error - du.log_abs - log_scale) + 1e-16;
  return out;
}

// ---------------------------------------------------------------- theta functions

namespace {

struct ThetaData {
  Rational a;  // 1/2 k k_p
  RationalVector g;
  Rational c;
};

ThetaData theta_data(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s) {
  require_convergent(s);
  alg.check_weight(lambda);
  if (!(lambda.k > 0)) throw DomainError("eval_theta: level must be > 0");
  const Rational k = lambda.k, kp = s.point.k;
  ThetaData t;
  t.a = Rational(1, 2) * k * kp;
  t.g.resize(alg.rank());
  for (std::size_t i = 0; i < alg.rank(); ++i) t.g[i] = k * s.point.z[i] - kp * lambda.z[i];
  t.c = pair_exact(alg, lambda, s) - alg.inner(lambda, lambda) * kp / (2 * k);
  return t;
}

}  // namespace

EvalResult eval_theta_radius(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double radius) {
  ThetaData t = theta_data(alg, lambda, s);
  const WeylGroup& W = alg.weyl();
  double log_sum = kNegInf;
  auto pts = W.lattice_ball(radius);
  for (const auto& c : pts) {
    RationalVector alpha = to_rational(W.to_root_coords(c));
    Rational e = t.c + alg.finite_inner(t.g, alpha) - t.a * alg.finite_inner(alpha, alpha);
    log_sum = log_add(log_sum, e.get_d());
  }
  double g = std::sqrt(std::max(0.0, alg.finite_inner(t.g, t.g).get_d()));
  EvalResult out;
  out.log_value = log_sum;
  out.value = safe_exp(log_sum);
  out.tail_bound = safe_exp(gaussian_tail_log(W, t.a.get_d(), g, t.c.get_d(), radius));
  out.truncation_depth = static_cast<long>(pts.size());
  out.method = "theta";
  return out;
}

EvalResult eval_theta(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps) {
  if (!(eps > 0)) throw DomainError("eval_theta: eps must be > 0");
  ThetaData t = theta_data(alg, lambda, s);
  const WeylGroup& W = alg.weyl();
  double g = std::sqrt(std::max(0.0, alg.finite_inner(t.g, t.g).get_d()));
  // the sum is at least its largest term near the peak; start from the identity term
  EvalResult first = eval_theta_radius(alg, lambda, s, g / (2 * t.a.get_d()) + W.covering_radius());
  double radius = gaussian_tail_radius(W, t.a.get_d(), g, t.c.get_d(), std::log(eps) + first.log_value);
  return eval_theta_radius(alg, lambda, s, radius);
}

BridgeCheck theta_bridge(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps) {
  const WeylGroup& W = alg.weyl();
  const Rational k = lambda.k, kp = s.point.k;
  double pre = Rational(alg.inner(lambda, lambda) * kp / (2 * k)).get_d();
  BridgeCheck out;
  for (std::size_t w = 0; w < W.order(); ++w) {
    EvalResult th = eval_theta(alg, apply_finite(alg, w, lambda), s, eps);
    out.lhs += W.finite()[w].sign * std::exp(pre + th.log_value);
    out.tail += std::exp(pre) * th.tail_bound;
    out.scale += std::exp(pre + th.log_value);
  }
  AlternatingSum alt = alternating_sum(alg, lambda, s, nullptr, eps);
  double base = pair(alg, lambda, s);
  out.rhs = alt.value.re.to_double() * std::exp(base);
  out.tail += std::exp(base + alt.log_abs_error);
  return out;
}

// ---------------------------------------------------------------- denominator identity

DenominatorCheck denominator_check(const AffineAlgebra& alg, const Specialization& s, long depth, long bits) {
  require_convergent(s);
  if (depth < 0) throw DomainError("denominator_check: depth must be >= 0");
  const WeylGroup& W = alg.weyl();
  const Rational kp = s.point.k;
  DenominatorCheck out;
  out.depth = depth;

  // product side: polynomial in X = e^{-k_p}, coefficient of X^m carries e^{-(beta|p)}
  std::vector<MpFloat> prod(depth + 1, MpFloat(bits));
  prod[0] = MpFloat(1.0, bits);
  double log_abs_work = 0;
  MpFloat one(1.0, bits);
  for (const auto& root : root_datum(alg, depth)) {
    Rational fin = alg.finite_inner(to_rational(root.finite), s.point.z);
    MpFloat c = root.imaginary ? MpFloat(1.0, bits) : MpFloat::exp(MpFloat(-fin, bits));
    log_abs_work = std::max(log_abs_work, -fin.get_d());
    for (long rep = 0; rep < root.mult; ++rep) {
      ++out.roots;
      if (root.m == 0) {
        MpFloat f = one - c;
        for (auto& x : prod) x *= f;
      } else {
        for (long j = depth; j >= root.m; --j) prod[j] -= c * prod[j - root.m];
      }
    }
  }

  // sum side: w with delta-depth(rho - w rho) <= depth
  std::vector<MpFloat> sum(depth + 1, MpFloat(bits));
  const Weight& rho = alg.rho();
  const double rn = std::sqrt(alg.finite_inner(rho.z, rho.z).get_d());
  const double hv = static_cast<double>(alg.dual_coxeter());
  const double radius = (rn + std::sqrt(rn * rn + 2 * hv * depth)) / hv + 1e-9;
  for (const auto& w : enumerate_bounded(alg, radius)) {
    Weight diff = rho - apply(alg, w, rho);
    if (diff.b > depth) continue;
    long m = to_long_exact(diff.b);
    Rational e = pair_exact(alg, diff, s) - Rational(m) * kp;
    MpFloat term = MpFloat::exp(MpFloat(-e, bits));
    if (W.finite()[w.finite].sign < 0) term = -term;
    sum[m] += term;
    ++out.weyl_terms;
  }

  MpFloat x = MpFloat::exp(MpFloat(-kp, bits));
  MpFloat xp(1.0, bits), p_val(bits), s_val(bits), abs_p(bits);
  for (long m = 0; m <= depth; ++m) {
    p_val += prod[m] * xp;
    s_val += sum[m] * xp;
    abs_p += MpFloat::abs(prod[m]) * xp;
    xp *= x;
  }
  MpFloat diff = p_val - s_val;
  out.product = p_val.to_double();
  out.sum = s_val.to_double();
  out.residual = std::exp(diff.log_abs() - p_val.log_abs());
  out.noise_floor = std::exp(abs_p.log_abs() - p_val.log_abs() + log_abs_work * 0 - (bits - 8) * std::log(2.0)) *
                    static_cast<double>(out.roots + out.weyl_terms);
  return out;
}

double denominator_residual(const AffineAlgebra& alg, const Specialization& s, long depth) {
  return denominator_check(alg, s, depth).residual;
}

}  // namespace affine
