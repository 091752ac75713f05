#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affine/algebra.hpp"
#include "affine/characters.hpp"
#include "affine/weyl.hpp"

namespace affine {

/// s Lambda0 + z with z in the orthonormal basis L^T (root coordinates), G = L L^T.
struct SpaceTimePoint {
  double s = 0;
  RealVector z;
};

struct SpaceTimePath {
  std::vector<SpaceTimePoint> points;
  double dt = 0;
  std::uint64_t seed = 0;
  std::optional<double> exited_at;
  long refinements = 0;  // sub-steps taken near the boundary
  bool aborted = false;  // conditioned sampler gave up below the minimal step
};

struct ChamberTest {
  bool inside = false;
  double margin = 0;  // min_i x(alpha_i^vee)
};

enum class DensityMode { drifted_by_x, drifted_by_y, undrifted };

struct DensityResult {
  double value = 0;
  double tail_bound = 0;
  std::size_t terms = 0;
};

struct GradientResult {
  double value = 0;
  double ds = 0;
  RealVector dz;
  double tail_bound = 0;
};

/// Geometry of the space-time chamber for one algebra: orthonormal coordinates, the
/// Weyl data needed by survival and reflected sums, and cached lattice balls.
class SpaceTime {
 public:
  explicit SpaceTime(const AffineAlgebra& alg);

  const AffineAlgebra& algebra() const { return alg_; }
  std::size_t rank() const { return l_; }
  double dual_coxeter() const { return hv_; }
  /// rho-barbar in orthonormal coordinates.
  const RealVector& rho() const { return rho_y_; }

  RealVector to_root(const RealVector& y) const;
  RealVector to_ortho(const RealVector& root) const;
  SpaceTimePoint from_weight(const Weight& w) const;
  /// Nearest weight with rational coordinates (denominator `den`) for exact checks.
  Weight to_weight(const SpaceTimePoint& p, long den = 1000000) const;

  RealVector pairings(const SpaceTimePoint& p) const;
  ChamberTest chamber(const SpaceTimePoint& p) const;

  double heat_density(const SpaceTimePoint& x, const SpaceTimePoint& y, double t, bool drifted) const;
  /// sum over W of det(w) e^{(x, w rho - rho)}, with a bound covering truncation and rounding.
  EvalResult survival(const SpaceTimePoint& x, double eps = 1e-14) const;
  GradientResult survival_gradient(const SpaceTimePoint& x, double eps = 1e-14) const;
  DensityResult reflected_density(const SpaceTimePoint& x, const SpaceTimePoint& y, double t, DensityMode mode,
                                  double eps = 1e-16, bool identity_only = false) const;
  /// Killed density of the driftless process from the h^vee Lambda0 form of the reflection sum.
  DensityResult killed_density_undrifted(const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                                         double eps = 1e-16) const;
  /// Likelihood ratio of the drifted to the driftless Gaussian over time t.
  double girsanov_factor(const SpaceTimePoint& x, const SpaceTimePoint& y, double t) const;
  /// g_w(s, z) = e^{(s Lambda0 + z, w rho - rho)}.
  double g_w(const AffineWeylElement& w, const SpaceTimePoint& p) const;

 private:
  struct Term {
    int sign;
    RealVector v;  // orthonormal coordinates of w rho - rho (finite part)
    double b;      // delta coefficient of w rho - rho
  };
  // sum over finite parts of Gaussian lattice sums exp(c + (g|alpha) - a|alpha|^2)
  struct Quad {
    int sign;
    double c;
    RealVector g;  // root coordinates
    double a;
  };
  DensityResult gaussian_sum(const std::vector<Quad>& quads, double log_tol, const RealVector* weight_scale,
                             bool identity_only) const;
  const std::vector<RealVector>& ball(double radius) const;
  void wrho_terms(double radius, std::vector<Term>& out) const;

  const AffineAlgebra& alg_;
  std::size_t l_;
  double hv_;
  RealMatrix G_, L_, Linv_t_;
  RealVector rho_root_, rho_y_;
  std::vector<RealMatrix> wmat_;
  std::vector<int> wsign_;
  RealMatrix cartan_;  // affine Cartan matrix as doubles
  mutable std::map<long, std::vector<RealVector>> balls_;
};

ChamberTest chamber_test(const AffineAlgebra& alg, const SpaceTimePoint& p);
double heat_density(const AffineAlgebra& alg, const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                    bool drifted);
EvalResult survival(const AffineAlgebra& alg, const SpaceTimePoint& x, double eps = 1e-14);
GradientResult survival_gradient(const AffineAlgebra& alg, const SpaceTimePoint& x);
DensityResult reflected_density(const AffineAlgebra& alg, const SpaceTimePoint& x, const SpaceTimePoint& y, double t,
                                DensityMode mode);

/// |log LHS - log RHS| / max(1, |log RHS|) for p0_t(bar(wx), bar(wy)) = e^{(w(y-x) - (y-x), h Lambda0)} p0_t(bar x, bar y).
double wonpt_residual(const AffineAlgebra& alg, const Weight& x, const Weight& y, const Rational& t,
                      const AffineWeylElement& w);

/// Normalized finite-difference value of (1/2 Laplacian + h d/ds + (rho, grad)) g_w at p.
double harmonic_residual(const AffineAlgebra& alg, const AffineWeylElement& w, const SpaceTimePoint& p, double step);

struct SampleOptions {
  double t_max = 1;
  double dt = 1e-3;
  long n_paths = 1;
  std::uint64_t seed = 0;
  bool conditioned = false;
  bool keep_points = true;
  /// With keep_points off, store only the states after these step counts (sorted, 0 allowed).
  std::vector<long> record_steps;
  /// Extra exit monitoring on every k-th step (k > 1) in addition to every step.
  long coarse_monitor = 0;
  long dt_min_divisor = 1024;
};

struct SampleSummary {
  std::vector<SpaceTimePath> paths;
  std::vector<bool> exited_coarse;  // filled when coarse_monitor > 1
  long refinements = 0;
  long aborted = 0;
};

/// Euler-Maruyama for the drifted process (or its h-transform when conditioned).
SampleSummary sample_paths(const SpaceTime& st, const SpaceTimePoint& x0, const SampleOptions& opt);
std::vector<SpaceTimePath> sample_paths(const AffineAlgebra& alg, const SpaceTimePoint& x0, double t_max, double dt,
                                        long n_paths, std::uint64_t seed, bool conditioned);

struct ExitEstimate {
  double p_fine = 0, p_coarse = 0, p_extrapolated = 0, se_extrapolated = 0;
  long n = 0;
};

/// Exit probability by time t_max with Richardson extrapolation in sqrt(dt) between
/// monitoring on every step and on every fourth step of the same paths.
ExitEstimate exit_probability(const SpaceTime& st, const SpaceTimePoint& x0, double t_max, double dt, long n_paths,
                              std::uint64_t seed);

/// Integral of the reflected density over the level slice at time t (composite Simpson).
double survival_quadrature(const SpaceTime& st, const SpaceTimePoint& x0, double t, long nodes = 2000);

}  // namespace affine
