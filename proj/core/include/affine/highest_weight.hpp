#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "affine/algebra.hpp"

namespace affine {

/// Positive root beta + m*delta (real) or m*delta (imaginary) of an untwisted algebra.
struct RootEntry {
  Weight root;
  IntVector finite;  // beta in root coordinates; zero for imaginary roots
  long m = 0;        // delta-depth of the root
  bool imaginary = false;
  long mult = 1;
};

/// Positive roots with delta-depth m <= depth, real roots first by (m, beta).
std::vector<RootEntry> root_datum(const AffineAlgebra& alg, long depth);

/// Weight multiplicities keyed by (depth d, offset o): the weight top - d*delta + o
/// where o is an integer vector in root coordinates.
class MultiplicityTable {
 public:
  using Layer = std::map<IntVector, BigInt>;

  MultiplicityTable() = default;
  MultiplicityTable(Weight top, long depth, std::string tag);

  const Weight& top() const { return top_; }
  long depth() const { return depth_; }
  const std::string& tag() const { return tag_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(long d) const { return layers_.at(d); }

  BigInt at(long d, const IntVector& o) const;
  /// Multiplicity of an arbitrary weight; zero when outside the support, throws
  /// TruncationError when the weight is deeper than the table.
  BigInt at(const Weight& w) const;
  void set(long d, const IntVector& o, const BigInt& value);
  void add(long d, const IntVector& o, const BigInt& value);

  Weight weight(long d, const IntVector& o) const;
  /// (d, o) of w relative to top; false when w is not in top + (integer root lattice).
  bool key_of(const Weight& w, long& d, IntVector& o) const;

  std::size_t size() const;
  BigInt layer_mass(long d) const;
  /// Restriction to depth <= d.
  MultiplicityTable truncated(long d) const;

  std::string to_csv() const;

  friend bool operator==(const MultiplicityTable& a, const MultiplicityTable& b);
  friend bool operator!=(const MultiplicityTable& a, const MultiplicityTable& b) { return !(a == b); }

 private:
  Weight top_;
  long depth_ = 0;
  std::string tag_;
  std::vector<Layer> layers_;
};

/// dim V(lambda)_mu for depth(mu) <= depth by the Freudenthal recursion.
MultiplicityTable freudenthal_table(const AffineAlgebra& alg, const Weight& lambda, long depth);

/// Same contract, computed by the Weyl-Kac numerator divided by the denominator
/// product as truncated formal power series in e^{-alpha_0}, ..., e^{-alpha_l}.
MultiplicityTable character_series_oracle(const AffineAlgebra& alg, const Weight& lambda, long depth);

/// Product of formal characters, truncated at depth.
MultiplicityTable multiply_tables(const MultiplicityTable& a, const MultiplicityTable& b, long depth);

/// Weight multiplicities of V(omega)^{tensor n}; n = 0 gives the point mass at 0.
MultiplicityTable tensor_power_table(const AffineAlgebra& alg, const Weight& omega, long n, long depth);

/// Multiplicity of V(beta) in V(lambda) (x) V(omega)^{(x) n} by the alternating Weyl sum over
/// the supplied tensor-power table. Throws TruncationError when the table is too shallow.
BigInt branching_mult(const AffineAlgebra& alg, const MultiplicityTable& tensor_power, const Weight& lambda,
                      const Weight& omega, long n, const Weight& beta);
/// Convenience overload building a tensor-power table of the given depth.
BigInt branching_mult(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n,
                      const Weight& beta, long depth);
/// Smallest tensor-power depth for which branching_mult(lambda, omega, n, beta) is certified.
long branching_required_depth(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, long n,
                              const Weight& beta);

struct BranchingTerm {
  Weight highest;
  long depth = 0;  // relative to lambda + n*omega
  IntVector offset;
  BigInt mult;
};

/// Independent oracle: expand ch_lambda * ch_omega^n and peel off ch_mu greedily from the top.
std::vector<BranchingTerm> branching_by_division(const AffineAlgebra& alg, const Weight& lambda,
                                                 const Weight& omega, long n, long depth);

/// Multiplicity lookup with automatic depth choice.
BigInt weight_multiplicity(const AffineAlgebra& alg, const Weight& lambda, const Weight& mu);

void require_untwisted_dominant(const AffineAlgebra& alg, const Weight& w, const char* what);

}  // namespace affine
