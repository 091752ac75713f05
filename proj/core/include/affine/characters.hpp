#pragma once

#include <complex>
#include <string>

#include "affine/algebra.hpp"
#include "affine/mpfloat.hpp"

namespace affine {

/// Evaluation point nu(h) in h*, so that <mu, h> = (mu|point).
struct Specialization {
  Weight point;
  std::string description;
};

/// Validates (delta|point) > 0.
Specialization make_specialization(const AffineAlgebra& alg, Weight point, std::string description);
/// point = rho / n.
Specialization rho_specialization(const AffineAlgebra& alg, long n);
/// (mu|point) exactly.
Rational pair_exact(const AffineAlgebra& alg, const Weight& mu, const Specialization& s);
double pair(const AffineAlgebra& alg, const Weight& mu, const Specialization& s);

struct EvalResult {
  double value = 0;           // may be +inf when log_value > ~709
  double log_value = 0;
  long truncation_depth = 0;  // delta-depth (series) or lattice shells used (closed forms)
  double tail_bound = 0;      // absolute bound on the discarded part
  std::string method;
};

/// Character series sum_mu dim V(lambda)_mu e^{(mu|point)}, grown in depth until the
/// estimated tail is below eps * value. Throws TruncationError past depth_cap.
EvalResult eval_character(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps,
                          long depth_cap = 400);
/// Series truncated at a fixed depth; tail_bound is +inf when the layer ratios do not yet
/// certify a geometric tail.
EvalResult eval_character_at_depth(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                   long depth);
/// Weyl-Kac closed form e^{(lambda|p)} A_{lambda+rho}(p) / A_rho(p), adaptive precision.
EvalResult eval_character_closed(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                 double rel_tol = 1e-13);

/// sum_{w in W} det(w) e^{(w Lambda - Lambda | p)} e^{2 pi i (w Lambda - Lambda | u)} for positive level.
struct AlternatingSum {
  MpComplex value;
  double log_abs = 0;
  double log_l1 = 0;         // log sum |terms|
  double log_abs_error = 0;  // log of the truncation + rounding bound
  long bits = 53;
  long terms = 0;
};

AlternatingSum alternating_sum(const AffineAlgebra& alg, const Weight& big_lambda, const Specialization& s,
                               const RationalVector* u = nullptr, double rel_tol = 1e-15);

/// ch_lambda(p + 2 pi i u) / ch_lambda(p) for u in the finite part, with an absolute error bound.
struct TwistedRatio {
  std::complex<double> value;
  double abs_error = 0;
};
TwistedRatio twisted_character_ratio(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s,
                                     const RationalVector& u, double rel_tol = 1e-14);

/// Theta_lambda = e^{-(lambda|lambda) k_p / 2k} sum_{alpha in M} e^{(t_alpha lambda | p)}.
EvalResult eval_theta(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps);
/// Lattice sum restricted to |alpha| <= radius; tail bound for the rest.
EvalResult eval_theta_radius(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double radius);

struct BridgeCheck {
  double lhs = 0, rhs = 0, tail = 0, scale = 0;
};
/// e^{(lambda|lambda) k_p / 2k} sum_{w0} det(w0) Theta_{w0 lambda} against sum_W det(w) e^{(w lambda|p)}.
BridgeCheck theta_bridge(const AffineAlgebra& alg, const Weight& lambda, const Specialization& s, double eps);

struct DenominatorCheck {
  double product = 0, sum = 0, residual = 0, noise_floor = 0;
  long depth = 0, roots = 0, weyl_terms = 0;
};
/// Both sides of prod (1 - e^{-alpha})^{mult} = sum det(w) e^{w rho - rho} as formal series
/// truncated at delta-depth D, evaluated at the specialization.
DenominatorCheck denominator_check(const AffineAlgebra& alg, const Specialization& s, long depth, long bits = 256);
double denominator_residual(const AffineAlgebra& alg, const Specialization& s, long depth);

}  // namespace affine
