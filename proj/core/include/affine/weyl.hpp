#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "affine/algebra.hpp"

namespace affine {

/// Element of the finite Weyl group acting on root coordinates of the finite part.
struct FiniteWeylElement {
  IntMatrix matrix;       // z -> matrix * z
  std::vector<int> word;  // simple reflection indices in 1..l, shortest found by BFS
  int sign = 1;
};

/// t_alpha * w with alpha given in the Z-basis of the lattice M.
struct AffineWeylElement {
  IntVector translation;
  std::size_t finite = 0;  // index into WeylGroup::finite()

  friend bool operator==(const AffineWeylElement& a, const AffineWeylElement& b) {
    return a.finite == b.finite && a.translation == b.translation;
  }
};

class WeylGroup {
 public:
  explicit WeylGroup(const AffineAlgebra& alg, std::size_t order_cap = 1000000);

  std::size_t rank() const { return rank_; }
  const std::vector<FiniteWeylElement>& finite() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  std::size_t identity() const { return 0; }
  std::size_t index_of(const IntMatrix& m) const;
  std::size_t multiply(std::size_t a, std::size_t b) const;
  std::size_t inverse(std::size_t a) const { return inverse_[a]; }

  /// Rows are a Z-basis of M in root coordinates (Hermite normal form).
  const IntMatrix& lattice_basis() const { return basis_; }
  /// Finite element acting on lattice coordinates.
  const IntMatrix& lattice_action(std::size_t w) const { return lattice_action_[w]; }
  /// Real matrices for hot loops.
  const RealMatrix& real_matrix(std::size_t w) const { return real_[w]; }
  /// Gram matrix of the lattice basis.
  const RationalMatrix& lattice_gram() const { return lattice_gram_; }

  IntVector to_root_coords(const IntVector& lattice) const;
  /// Throws DomainError when v is not in M.
  IntVector to_lattice_coords(const RationalVector& v) const;

  /// Lattice coordinate vectors c with |sum c_r b_r| <= radius (box-then-filter).
  std::vector<IntVector> lattice_ball(double radius) const;
  /// Upper bound on the covering radius of M (used by tail bounds).
  double covering_radius() const { return covering_radius_; }
  double covolume() const { return covolume_; }

 private:
  std::size_t rank_;
  std::vector<FiniteWeylElement> elements_;
  std::map<IntMatrix, std::size_t> index_;
  std::vector<std::size_t> inverse_;
  IntMatrix basis_;
  RationalMatrix basis_inv_;  // maps root coords to lattice coords (row vector convention)
  std::vector<IntMatrix> lattice_action_;
  std::vector<RealMatrix> real_;
  RationalMatrix lattice_gram_;
  RealMatrix lattice_gram_inv_;
  double covering_radius_ = 0, covolume_ = 0;
};

const std::vector<FiniteWeylElement>& finite_group(const AffineAlgebra& alg);
Weight reflect(const AffineAlgebra& alg, std::size_t i, const Weight& w);
const IntMatrix& lattice_basis(const AffineAlgebra& alg);
/// t_alpha(lambda) for alpha in M given in root coordinates.
Weight translate(const AffineAlgebra& alg, const RationalVector& alpha, const Weight& w);
Weight apply_finite(const AffineAlgebra& alg, std::size_t finite, const Weight& w);
Weight apply(const AffineAlgebra& alg, const AffineWeylElement& e, const Weight& w);
int sign(const AffineAlgebra& alg, const AffineWeylElement& e);
AffineWeylElement compose(const AffineAlgebra& alg, const AffineWeylElement& a, const AffineWeylElement& b);
AffineWeylElement inverse(const AffineAlgebra& alg, const AffineWeylElement& a);
AffineWeylElement translation_element(const AffineAlgebra& alg, const IntVector& lattice_coords);
/// Translation vector of e in root coordinates.
RationalVector translation_vector(const AffineAlgebra& alg, const AffineWeylElement& e);
/// All (alpha, w) with |alpha| <= radius, every finite part for each lattice point.
std::vector<AffineWeylElement> enumerate_bounded(const AffineAlgebra& alg, double radius);
std::string to_json(const AffineAlgebra& alg, const AffineWeylElement& e);

/// log of an upper bound on sum over alpha in M with |alpha| > radius of
/// exp(c + g|alpha| - a|alpha|^2), a > 0, from lattice-point counting with the covering radius.
double gaussian_tail_log(const WeylGroup& group, double a, double g, double c, double radius);
/// Smallest radius (to 1%) whose gaussian_tail_log is <= log_tol; never below the peak g/(2a).
double gaussian_tail_radius(const WeylGroup& group, double a, double g, double c, double log_tol);
/// log(exp(x) + exp(y)) without overflow.
double log_add(double x, double y);

}  // namespace affine
