#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace affine {

using Rational = mpq_class;
using BigInt = mpz_class;

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major
using IntVector = std::vector<long>;
using IntMatrix = std::vector<IntVector>;            // row-major
using RealVector = std::vector<double>;
using RealMatrix = std::vector<RealVector>;

Rational make_rational(long num, long den = 1);
double to_double(const Rational& q);
double to_double(const BigInt& z);
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

bool is_integer(const Rational& q);
long to_long_exact(const Rational& q);  // throws ConsistencyError if q is not an integer

RationalMatrix to_rational(const IntMatrix& m);
RationalVector to_rational(const IntVector& v);
RealVector to_real(const RationalVector& v);
RealMatrix to_real(const RationalMatrix& m);

RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v);
RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix transpose(const RationalMatrix& m);
IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b);
IntVector mat_vec(const IntMatrix& m, const IntVector& v);
IntMatrix identity_int(std::size_t n);

/// x^T G y for a symmetric Gram matrix.
Rational bilinear(const RationalMatrix& gram, const RationalVector& x, const RationalVector& y);
double bilinear(const RealMatrix& gram, const RealVector& x, const RealVector& y);

/// Exact inverse; throws DomainError if singular.
RationalMatrix inverse(const RationalMatrix& m);
/// Basis of the right null space {x : m x = 0}.
std::vector<RationalVector> null_space(const RationalMatrix& m);
std::size_t rank(const RationalMatrix& m);

/// Primitive integer multiple of a rational vector (gcd of entries 1, first nonzero entry positive).
IntVector primitive_integer(const RationalVector& v);

/// Row-style Hermite normal form of the lattice spanned by the rows of `generators`;
/// returns the nonzero rows (upper triangular, positive pivots, reduced above pivots).
IntMatrix hermite_normal_form(IntMatrix generators);

/// Lower-triangular Cholesky factor L with m = L L^T. Throws DomainError if m is not positive definite.
RealMatrix cholesky(const RealMatrix& m);
RealMatrix inverse(const RealMatrix& m);

}  // namespace affine
