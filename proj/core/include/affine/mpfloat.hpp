#pragma once

#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace affine {

/// Minimal RAII wrapper over mpfr_t with an explicit precision per value.
class MpFloat {
 public:
  explicit MpFloat(long bits = 128) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  MpFloat(double x, long bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  MpFloat(const mpq_class& q, long bits) { mpfr_init2(v_, bits); mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
  MpFloat(const MpFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  MpFloat& operator=(const MpFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  ~MpFloat() { mpfr_clear(v_); }

  long bits() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Natural log of |x|; -inf for zero.
  double log_abs() const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  MpFloat& operator+=(const MpFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpFloat& operator-=(const MpFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpFloat& operator*=(const MpFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpFloat& operator/=(const MpFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  friend MpFloat operator+(MpFloat a, const MpFloat& b) { return a += b; }
  friend MpFloat operator-(MpFloat a, const MpFloat& b) { return a -= b; }
  friend MpFloat operator*(MpFloat a, const MpFloat& b) { return a *= b; }
  friend MpFloat operator/(MpFloat a, const MpFloat& b) { return a /= b; }
  MpFloat operator-() const { MpFloat r(*this); mpfr_neg(r.v_, r.v_, MPFR_RNDN); return r; }

  static MpFloat exp(const MpFloat& x) { MpFloat r(x.bits()); mpfr_exp(r.v_, x.v_, MPFR_RNDN); return r; }
  static MpFloat exp_rational(const mpq_class& q, long bits) { return exp(MpFloat(q, bits)); }
  static MpFloat abs(const MpFloat& x) { MpFloat r(x); mpfr_abs(r.v_, r.v_, MPFR_RNDN); return r; }
  /// cos(2 pi q) and sin(2 pi q) for rational q, exact reduction mod 1 first.
  static void cis_two_pi(const mpq_class& q, long bits, MpFloat& c, MpFloat& s);

 private:
  mpfr_t v_;
};

/// Complex number over MpFloat.
struct MpComplex {
  MpFloat re, im;
  explicit MpComplex(long bits = 128) : re(bits), im(bits) {}
  MpComplex(MpFloat r, MpFloat i) : re(std::move(r)), im(std::move(i)) {}
  MpComplex& operator+=(const MpComplex& o) { re += o.re; im += o.im; return *this; }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return MpComplex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    MpFloat den = b.re * b.re + b.im * b.im;
    return MpComplex((a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den);
  }
  double log_abs() const;
};

}  // namespace affine
