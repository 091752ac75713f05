#include "affine/mpfloat.hpp"

#include <cmath>
#include <limits>

namespace affine {

double MpFloat::log_abs() const {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

void MpFloat::cis_two_pi(const mpq_class& q, long bits, MpFloat& c, MpFloat& s) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  mpq_class frac = q - mpq_class(fl);
  MpFloat x(frac, bits + 8);
  MpFloat pi(bits + 8);
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  x *= pi;
  x *= MpFloat(2.0, bits + 8);
  c = MpFloat(bits);
  s = MpFloat(bits);
  mpfr_sin_cos(s.get(), c.get(), x.get(), MPFR_RNDN);
}

double MpComplex::log_abs() const {
  double a = re.log_abs(), b = im.log_abs();
  double m = std::max(a, b);
  if (std::isinf(m)) return m;
  return m + 0.5 * std::log(std::exp(2 * (a - m)) + std::exp(2 * (b - m)));
}

}  // namespace affine
