#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "affine/numeric.hpp"

namespace affine {

/// Generalized Cartan matrix indexed 0..l; row/column 0 is the affine node.
struct CartanMatrix {
  std::size_t rank = 0;  // l
  IntMatrix entries;     // (l+1) x (l+1)
};

/// Element of h* written as k*Lambda0 + sum_i z_i alpha_i + b*delta (i = 1..l).
struct Weight {
  Rational k;
  RationalVector z;
  Rational b;

  Weight() = default;
  Weight(Rational level, RationalVector finite, Rational delta_coeff)
      : k(std::move(level)), z(std::move(finite)), b(std::move(delta_coeff)) {}

  static Weight zero(std::size_t rank);

  std::size_t rank() const { return z.size(); }
  /// Projection dropping the delta component.
  Weight bar() const { return Weight(k, z, 0); }
  /// Projection onto the finite part.
  Weight barbar() const { return Weight(0, z, 0); }

  Weight& operator+=(const Weight& o);
  Weight& operator-=(const Weight& o);
  Weight& operator*=(const Rational& c);
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator*(const Rational& c, Weight a) { return a *= c; }
  friend Weight operator-(Weight a) { return a *= Rational(-1); }
  friend bool operator==(const Weight& a, const Weight& b) { return a.k == b.k && a.z == b.z && a.b == b.b; }
  friend bool operator!=(const Weight& a, const Weight& b) { return !(a == b); }
  friend bool operator<(const Weight& a, const Weight& b);

  std::string to_string() const;
};

class WeylGroup;

struct WeightClass {
  Rational level;
  bool dominant = false;
  bool integral = false;
};

/// Validated affine Cartan data plus the induced form on h* in the basis
/// (Lambda0, alpha_1..alpha_l, delta).
class AffineAlgebra {
 public:
  /// Throws NotAffineError for matrices that are not of affine type.
  explicit AffineAlgebra(CartanMatrix cartan, std::string name = {});

  const std::string& name() const { return name_; }
  std::size_t rank() const { return cartan_.rank; }
  const CartanMatrix& cartan() const { return cartan_; }
  long entry(std::size_t i, std::size_t j) const { return cartan_.entries[i][j]; }
  const IntVector& marks() const { return marks_; }
  const IntVector& comarks() const { return comarks_; }
  long coxeter() const { return coxeter_; }
  long dual_coxeter() const { return dual_coxeter_; }
  /// True when a_0 = 1 and theta = sum a_i alpha_i is the highest root of the finite part.
  bool untwisted() const { return untwisted_; }

  /// (l+2)x(l+2) Gram matrix on (Lambda0, alpha_1..alpha_l, delta).
  const RationalMatrix& gram_hstar() const { return gram_hstar_; }
  /// l x l block (alpha_i|alpha_j), i, j >= 1.
  const RationalMatrix& finite_gram() const { return finite_gram_; }
  const RealMatrix& finite_gram_real() const { return finite_gram_real_; }
  /// Finite Cartan submatrix a_ij, i, j >= 1.
  const IntMatrix& finite_cartan() const { return finite_cartan_; }
  /// Roots of the finite part in root coordinates, all signs.
  const std::vector<IntVector>& finite_roots() const { return finite_roots_; }
  const std::vector<IntVector>& positive_finite_roots() const { return positive_roots_; }

  Weight lambda0() const;
  Weight delta() const;
  /// Simple root alpha_i, 0 <= i <= l.
  Weight alpha(std::size_t i) const;
  /// Fundamental weight Lambda_i with Lambda_i(alpha_j^vee) = delta_ij and zero delta part.
  Weight fundamental(std::size_t i) const;
  /// Weight with prescribed coroot pairings (length l+1) and delta coefficient.
  Weight from_pairings(const RationalVector& pairings, const Rational& delta_coeff = 0) const;

  Rational inner(const Weight& a, const Weight& b) const;
  Rational finite_inner(const RationalVector& a, const RationalVector& b) const;
  double finite_inner(const RealVector& a, const RealVector& b) const;
  /// lambda(alpha_i^vee).
  Rational pairing(const Weight& w, std::size_t i) const;
  RationalVector pairings(const Weight& w) const;

  /// rho = h^vee Lambda0 + rho-barbar with rho(alpha_i^vee) = 1 for all i.
  const Weight& rho() const { return rho_; }
  WeightClass classify(const Weight& w) const;
  bool is_dominant_integral(const Weight& w) const;

  void check_weight(const Weight& w) const;

  /// Finite Weyl group and translation lattice, built on first use and cached.
  const WeylGroup& weyl() const;

 private:
  CartanMatrix cartan_;
  std::string name_;
  IntVector marks_, comarks_;
  long coxeter_ = 0, dual_coxeter_ = 0;
  bool untwisted_ = false;
  RationalMatrix gram_hstar_, finite_gram_;
  RealMatrix finite_gram_real_;
  IntMatrix finite_cartan_;
  RationalMatrix finite_cartan_inv_;
  std::vector<IntVector> finite_roots_, positive_roots_;
  Weight rho_;
  mutable std::once_flag weyl_once_;
  mutable std::shared_ptr<const WeylGroup> weyl_;
};

using AlgebraPtr = std::shared_ptr<const AffineAlgebra>;

/// Untwisted type A_l^(1) Cartan matrix, l >= 1.
CartanMatrix affine_type_a(std::size_t l);
/// Registry lookup by name "A1~", "A2~", ...; throws DomainError for unknown names.
CartanMatrix cartan_by_name(const std::string& name);
/// Parses {"rank": l, "matrix": [[...]]}.
CartanMatrix cartan_from_json(const std::string& text);

AlgebraPtr make_algebra(const std::string& name);

}  // namespace affine
