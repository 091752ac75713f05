#include "affine/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "affine/error.hpp"

namespace affine {

Rational make_rational(long num, long den) {
  if (den == 0) throw DomainError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }
double to_double(const BigInt& z) { return z.get_d(); }

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text) {
  Rational q;
  auto slash = text.find('/');
  auto dot = text.find('.');
  if (dot != std::string::npos && slash == std::string::npos) {
    // decimal literal, interpreted exactly
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac = text.size() - dot - 1;
    BigInt num(digits.empty() ? "0" : digits, 10);
    BigInt den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    q = Rational(num, den);
  } else if (q.set_str(text, 10) != 0) {
    throw DomainError("cannot parse rational '" + text + "'");
  }
  q.canonicalize();
  return q;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

long to_long_exact(const Rational& q) {
  if (!is_integer(q)) throw ConsistencyError("expected an integer, got " + q.get_str());
  if (!q.get_num().fits_slong_p()) throw ConsistencyError("integer overflow converting " + q.get_str());
  return q.get_num().get_si();
}

RationalMatrix to_rational(const IntMatrix& m) {
  RationalMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = to_rational(m[i]);
  return out;
}

RationalVector to_rational(const IntVector& v) {
  RationalVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

RealVector to_real(const RationalVector& v) {
  RealVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

RealMatrix to_real(const RationalMatrix& m) {
  RealMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = to_real(m[i]);
  return out;
}

RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v) {
  RationalVector out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += m[i][j] * v[j];
    out[i] = s;
  }
  return out;
}

RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  RationalMatrix out(n, RationalVector(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][t] * b[t][j];
    }
  return out;
}

RationalMatrix transpose(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix out(m[0].size(), RationalVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
  return out;
}

IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IntMatrix out(n, IntVector(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][t] * b[t][j];
    }
  return out;
}

IntVector mat_vec(const IntMatrix& m, const IntVector& v) {
  IntVector out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

IntMatrix identity_int(std::size_t n) {
  IntMatrix out(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1;
  return out;
}

Rational bilinear(const RationalMatrix& gram, const RationalVector& x, const RationalVector& y) {
  Rational s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < y.size(); ++j) row += gram[i][j] * y[j];
    s += x[i] * row;
  }
  return s;
}

double bilinear(const RealMatrix& gram, const RealVector& x, const RealVector& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += x[i] * gram[i][j] * y[j];
  return s;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

RationalMatrix inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix aug(n, RationalVector(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw DomainError("inverse: matrix is not square");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) throw DomainError("inverse: matrix is singular");
  RationalMatrix out(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = aug[i][n + j];
  return out;
}

std::vector<RationalVector> null_space(const RationalMatrix& m) {
  if (m.empty()) return {};
  RationalMatrix a = m;
  const std::size_t cols = a[0].size();
  auto piv = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t rank(const RationalMatrix& m) {
  RationalMatrix a = m;
  return rref(a).size();
}

IntVector primitive_integer(const RationalVector& v) {
  BigInt den = 1;
  for (const auto& x : v) {
    BigInt d = x.get_den();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  std::vector<BigInt> ints(v.size());
  BigInt g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational s = v[i] * den;
    ints[i] = s.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ints[i].get_mpz_t());
  }
  if (g == 0) throw DomainError("primitive_integer: zero vector");
  IntVector out(v.size());
  int sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    BigInt q = ints[i] / g;
    if (sign == 0 && q != 0) sign = q > 0 ? 1 : -1;
    out[i] = q.get_si();
  }
  for (auto& x : out) x *= sign;
  return out;
}

IntMatrix hermite_normal_form(IntMatrix a) {
  if (a.empty()) return {};
  const std::size_t cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    // Euclid on column c among rows r..end until a single nonzero remains.
    while (true) {
      std::size_t best = a.size();
      for (std::size_t i = r; i < a.size(); ++i)
        if (a[i][c] != 0 && (best == a.size() || std::labs(a[i][c]) < std::labs(a[best][c]))) best = i;
      if (best == a.size()) break;
      std::swap(a[r], a[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < a.size(); ++i) {
        if (a[i][c] == 0) continue;
        long q = a[i][c] / a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
        if (a[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0)
      for (auto& x : a[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      long q = a[i][c] / a[r][c];
      if (a[i][c] - q * a[r][c] < 0) --q;
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
    }
    ++r;
  }
  a.resize(r);
  return a;
}

RealMatrix cholesky(const RealMatrix& m) {
  const std::size_t n = m.size();
  RealMatrix l(n, RealVector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0.0) throw DomainError("cholesky: matrix is not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

RealMatrix inverse(const RealMatrix& m) {
  const std::size_t n = m.size();
  RealMatrix a = m, inv(n, RealVector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::fabs(a[i][c]) > std::fabs(a[p][c])) p = i;
    if (a[p][c] == 0.0) throw DomainError("inverse: matrix is singular");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      double f = a[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace affine
