#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "affine/algebra.hpp"
#include "affine/chain.hpp"
#include "affine/characters.hpp"
#include "affine/error.hpp"
#include "affine/highest_weight.hpp"
#include "affine/rng.hpp"
#include "affine/stats.hpp"

using namespace affine;

namespace {

double log_ch(const AffineAlgebra& alg, const Weight& l, const Specialization& s) {
  return eval_character_closed(alg, l, s).log_value;
}

}  // namespace

TEST_CASE("mu_omega normalization and top term") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Weight omega = Rational(2) * alg.lambda0();
  const Specialization s = rho_specialization(alg, 5);
  const DiscreteDistribution mu = mu_omega(alg, omega, s, 30);
  CHECK(std::abs(mu.mass() + mu.defect - 1) < 1e-9);
  double top = -1;
  for (const auto& [w, p] : mu.support)
    if (w == omega) top = p;
  CHECK(top == doctest::Approx(std::exp(pair(alg, omega, s) - log_ch(alg, omega, s))).epsilon(1e-13));

  const DiscreteDistribution deeper = mu_omega(alg, omega, s, 40);
  CHECK(deeper.defect < mu.defect);
  std::map<Weight, double> d40(deeper.support.begin(), deeper.support.end());
  for (const auto& [w, p] : mu.support) CHECK(std::abs(d40[w] - p) <= mu.defect + 1e-15);
}

TEST_CASE("kernel rows are stochastic up to their defect") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    const Specialization s = rho_specialization(alg, 2);
    const Weight omega = Rational(alg.dual_coxeter()) * alg.lambda0();
    for (const Weight& lambda : {alg.lambda0(), alg.fundamental(1), alg.rho()}) {
      const KernelRow row = q_omega_row(alg, lambda, omega, s, 14);
      const double total = row.mass() + row.defect;
      CHECK(total >= 1 - 1e-6);
      CHECK(total <= 1 + 1e-6);
      for (const auto& [b, p] : row.entries) {
        CHECK(p >= 0);
        CHECK(alg.is_dominant_integral(b));
      }
    }
  }
}

TEST_CASE("delta-aggregated rows match the barred kernel") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 2);
  const Weight omega = Rational(2) * alg.lambda0();
  const BarredKernel kernel(alg, omega, s);
  for (const Weight& lambda : {alg.lambda0(), alg.fundamental(1), alg.from_pairings({2, 1})}) {
    const KernelRow agg = aggregate_mod_delta(q_omega_row(alg, lambda, omega, s, 16));
    const KernelRow& bar = kernel.row(lambda);
    CHECK(std::abs(bar.mass() + bar.defect - 1) < 1e-6);
    std::map<Weight, double> ref(bar.entries.begin(), bar.entries.end());
    for (const auto& [b, p] : agg.entries) CHECK(std::abs(ref[b] - p) <= agg.defect + bar.defect + 1e-10);
  }
}

TEST_CASE("n-step kernel equals the tensor-product branching transform") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 1);
  const Weight omega = alg.fundamental(1), lambda = alg.lambda0();
  const long depth = 6;
  for (long n = 1; n <= 3; ++n) {
    // n-fold product of truncated rows
    std::map<Weight, double> dist{{lambda, 1.0}};
    for (long step = 0; step < n; ++step) {
      std::map<Weight, double> next;
      for (const auto& [from, p] : dist)
        for (const auto& [to, q] : q_omega_row(alg, from, omega, s, depth).entries) next[to] += p * q;
      dist = std::move(next);
    }
    const Weight top = lambda + Rational(n) * omega;
    for (const auto& [beta, p] : dist) {
      long d;
      IntVector o;
      MultiplicityTable probe(top, depth, "probe");
      REQUIRE(probe.key_of(beta, d, o));
      if (d > depth) continue;
      const BigInt m = branching_mult(alg, lambda, omega, n, beta, branching_required_depth(alg, lambda, omega, n, beta));
      const double expect =
          std::exp(std::log(m.get_d()) + log_ch(alg, beta, s) - log_ch(alg, lambda, s) - n * log_ch(alg, omega, s));
      CHECK(p == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("barred walk transitions") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 2);
  const Weight omega = Rational(2) * alg.lambda0(), l0 = alg.lambda0();
  CHECK(pbar_power(alg, omega, s, 0, l0, l0, 10) == 1.0);
  CHECK(pbar_power(alg, omega, s, 0, l0, alg.fundamental(1), 10) == 0.0);
  const DiscreteDistribution mu = mu_omega(alg, omega, s, 40);
  const Weight beta0 = l0 + omega - alg.alpha(1);
  double agg = 0;
  for (const auto& [w, p] : mu.support)
    if ((w - (beta0 - l0)).bar() == Weight::zero(1)) agg += p;
  CHECK(pbar_power(alg, omega, s, 1, l0, beta0, 40) == doctest::Approx(agg).epsilon(1e-12));

  const ReflectionReport r = reflection_check(alg, omega, s, 0, alg.rho(), alg.rho(), 8);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(1.0));
  CHECK(r.residual == 0.0);
}

TEST_CASE("discrete reflection identity at small sizes") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 1);
  const Weight omega = Rational(2) * alg.lambda0();
  for (long n = 1; n <= 2; ++n) {
    const Weight l0 = alg.fundamental(1);
    const Weight top = l0 + Rational(n) * omega;
    CHECK(reflection_discrete_residual(alg, omega, s, n, l0, top, 14) < 1e-10);
    CHECK(reflection_discrete_residual(alg, omega, s, n, l0, top - alg.alpha(0), 14) < 1e-10);
  }
}

TEST_CASE("barred increment law") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 3);
  const Weight omega = Rational(2) * alg.lambda0();
  const IncrementLaw law(alg, omega, s);
  double total = 0;
  for (double p : law.probabilities()) total += p;
  CHECK(std::abs(total - 1) <= law.tail() + law.offsets().size() * law.abs_error() + 1e-12);

  // independent route: aggregate the depth-truncated mu_omega over delta
  const DiscreteDistribution mu = mu_omega(alg, omega, s, 60);
  std::map<IntVector, double> agg;
  for (const auto& [w, p] : mu.support) agg[{to_long_exact(w.z[0] - omega.z[0])}] += p;
  for (const auto& [o, p] : agg) CHECK(std::abs(law.probability(o) - p) <= mu.defect + law.abs_error() + 1e-13);

  // 1e5 draws against the law, chi-square on cells with enough expected counts
  std::mt19937_64 g = make_stream(99, 0);
  const long draws = 100000;
  std::map<std::size_t, long> counts;
  for (long i = 0; i < draws; ++i) ++counts[law.sample(g)];
  double chi2 = 0, rest_expect = 0;
  long rest_count = 0, cells = 0;
  for (std::size_t i = 0; i < law.offsets().size(); ++i) {
    const double e = draws * law.probabilities()[i];
    const long c = counts.count(i) ? counts[i] : 0;
    if (e >= 5) {
      chi2 += (c - e) * (c - e) / e;
      ++cells;
    } else {
      rest_expect += e;
      rest_count += c;
    }
  }
  if (rest_expect > 0) {
    chi2 += (rest_count - rest_expect) * (rest_count - rest_expect) / rest_expect;
    ++cells;
  }
  CHECK(chi_square_sf(chi2, cells - 1) > 1e-3);
}

TEST_CASE("chain trajectories") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 4);
  const Weight omega = Rational(2) * alg.lambda0();
  const Weight start = alg.from_pairings({1, 2});
  const auto a = simulate_chain(alg, start, omega, s, 40, 7);
  const auto b = simulate_chain(alg, start, omega, s, 40, 7);
  CHECK(a == b);
  REQUIRE(a.size() == 41);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].k == start.k + Rational(static_cast<long>(j)) * omega.k);
    CHECK(a[j].b == 0);
    CHECK(alg.is_dominant_integral(a[j]));
    // same coset of the root lattice as start + j omega
    const Rational shift = a[j].z[0] - start.z[0] - Rational(static_cast<long>(j)) * omega.z[0];
    CHECK(is_integer(shift));
  }
  const auto c = simulate_chain(alg, start, omega, s, 40, 8);
  CHECK(c != a);
}

TEST_CASE("rows refuse undersized truncation") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 1);
  const Weight omega = Rational(2) * alg.lambda0();
  CHECK_THROWS_AS(q_omega_row(alg, alg.fundamental(1) - alg.lambda0(), omega, s, 4), DomainError);
  const BarredKernel kernel(alg, omega, s);
  std::mt19937_64 g(1);
  CHECK_NOTHROW(kernel.step(alg.lambda0(), g));
}
