#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <utility>
#include <vector>

#include "affine/algebra.hpp"
#include "affine/characters.hpp"

namespace affine {

struct DiscreteDistribution {
  std::vector<std::pair<Weight, double>> support;
  double defect = 0;  // truncated mass
  double mass() const;
};

struct KernelRow {
  Weight from;
  std::vector<std::pair<Weight, double>> entries;
  double defect = 0;
  double mass() const;
};

/// Increment law of the weight walk: mult(beta) e^{(beta|p)} / ch_omega(p) over the
/// weights of V(omega) with depth <= depth.
DiscreteDistribution mu_omega(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, long depth);

/// Row of Q_omega from lambda over dominant beta with depth <= depth (relative to lambda + omega).
/// Entries use branching multiplicities; the defect is the barred kernel's mass at lambda
/// (summed over all depths) minus the truncated mass.
KernelRow q_omega_row(const AffineAlgebra& alg, const Weight& lambda, const Weight& omega, const Specialization& s,
                      long depth);

/// Aggregate entries that agree modulo delta; keys are barred weights.
KernelRow aggregate_mod_delta(const KernelRow& row);

/// Barred n-step transition of the weight walk from the tensor-power table truncated at depth.
double pbar_power(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, long n_steps,
                  const Weight& lambda0, const Weight& beta0, long depth);

/// Law of the barred increment zeta = barbar(beta), summed over all depths. Offsets are
/// zeta - barbar(omega) in root coordinates. Computed from class masses over Q/kM, which
/// come from twisted character values by finite Fourier inversion, spread over each class
/// by the theta-function profile exp((zeta|p) - k_p |zeta|^2 / 2k).
class IncrementLaw {
 public:
  IncrementLaw(const AffineAlgebra& alg, const Weight& omega, const Specialization& s, double log_tol = -40.0);

  const std::vector<IntVector>& offsets() const { return offsets_; }
  const std::vector<double>& probabilities() const { return probs_; }
  double probability(const IntVector& offset) const;
  /// Bound on the probability of offsets not listed.
  double tail() const { return tail_; }
  /// Bound on the absolute error of each listed probability.
  double abs_error() const { return abs_error_; }
  const std::vector<double>& class_masses() const { return class_mass_; }
  const std::vector<IntVector>& class_representatives() const { return class_rep_; }
  /// Mean of zeta in root coordinates.
  RealVector mean() const;
  /// Index into offsets(); throws TruncationError when the draw lands in the omitted mass.
  std::size_t sample(std::mt19937_64& g) const;
  /// Largest distance of a listed zeta from the profile center.
  double support_radius() const { return support_radius_; }
  const RealVector& center() const { return center_; }

 private:
  std::vector<IntVector> offsets_;
  std::vector<double> probs_, cdf_;
  std::map<IntVector, std::size_t> index_;
  std::vector<IntVector> class_rep_;
  std::vector<double> class_mass_;
  RealVector omega_z_, center_;
  double tail_ = 0, abs_error_ = 0, support_radius_ = 0;
};

/// Barred kernel Q-bar_omega on dominant weights modulo delta, by the reflection formula
///   Q(l, b) = A_{b+rho}/A_{l+rho} * sum_w det(w) e^{(L - wL | p)} P(barbar(wL) - barbar(l+rho))
/// with L = b + rho and P the barred increment law. Rows and A values are memoized.
class BarredKernel {
 public:
  BarredKernel(const AffineAlgebra& alg, Weight omega, Specialization s, double log_tol = -40.0);

  const AffineAlgebra& algebra() const { return alg_; }
  const Weight& omega() const { return omega_; }
  const Specialization& specialization() const { return s_; }
  const IncrementLaw& law() const { return law_; }

  const KernelRow& row(const Weight& lambda) const;
  /// log A_L(p) for L of positive level.
  double log_alt(const Weight& big) const;
  /// Next state; throws TruncationError when the row defect exceeds max_defect or the
  /// uniform draw falls into the defect.
  Weight step(const Weight& from, std::mt19937_64& g, double max_defect = 1e-4) const;

 private:
  struct Cached {
    KernelRow row;
    std::vector<double> cdf;
  };
  const Cached& cached(const Weight& lambda) const;
  double log_alt_fast(const RealVector& zbar, double level, bool& ok) const;
  const std::vector<RealVector>& ball(double radius) const;

  const AffineAlgebra& alg_;
  Weight omega_;
  Specialization s_;
  IncrementLaw law_;
  RealVector p_;
  double kp_;
  mutable std::recursive_mutex mutex_;
  mutable std::map<Weight, std::unique_ptr<Cached>> rows_;
  mutable std::map<Weight, double> alt_;
  mutable std::map<long, std::vector<RealVector>> balls_;
};

/// Barred chain trajectory of length steps + 1 starting at bar(start).
std::vector<Weight> simulate_chain(const AffineAlgebra& alg, const Weight& start, const Weight& omega,
                                   const Specialization& s, long steps, std::uint64_t seed);
std::vector<Weight> simulate_chain(const BarredKernel& kernel, const Weight& start, long steps,
                                   std::mt19937_64& g);

struct ReflectionReport {
  double lhs = 0, rhs = 0, residual = 0;
  long depth = 0;
  std::size_t weyl_terms = 0;
  long table_depth = 0;
};

/// n-step barred Q kernel from branching multiplicities (division of characters) against
/// the reflected sum of barred walk transitions (tensor-power table), with matching truncation.
ReflectionReport reflection_check(const AffineAlgebra& alg, const Weight& omega, const Specialization& s,
                                  long n_steps, const Weight& lambda0, const Weight& beta0, long depth);
double reflection_discrete_residual(const AffineAlgebra& alg, const Weight& omega, const Specialization& s,
                                    long n_steps, const Weight& lambda0, const Weight& beta0, long depth);

}  // namespace affine
