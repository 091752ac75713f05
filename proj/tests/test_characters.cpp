#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "affine/algebra.hpp"
#include "affine/characters.hpp"
#include "affine/error.hpp"
#include "affine/highest_weight.hpp"

using namespace affine;

TEST_CASE("rho specialization") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 1);
  CHECK(s.point == Weight(2, {Rational(1, 2)}, 0));
  CHECK(pair_exact(alg, alg.delta(), s) == 2);
  const Specialization s7 = rho_specialization(alg, 7);
  const Weight mu = alg.from_pairings({3, 1}, -2);
  CHECK(pair_exact(alg, mu, s7) == alg.inner(mu, alg.rho()) / 7);
  CHECK_THROWS_AS(make_specialization(alg, alg.fundamental(1) - alg.lambda0(), "level zero"), DomainError);
  CHECK_THROWS_AS(rho_specialization(alg, 0), DomainError);
}

TEST_CASE("depth zero truncation is the highest term") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 1);
  CHECK(eval_character_at_depth(alg, alg.lambda0(), s, 0).value ==
        doctest::Approx(std::exp(pair(alg, alg.lambda0(), s))).epsilon(1e-15));
  // in general depth 0 is the whole top layer, a module of the finite part
  for (const Weight& l : {alg.fundamental(1), alg.from_pairings({2, 3})}) {
    const MultiplicityTable t = freudenthal_table(alg, l, 0);
    double layer = 0;
    for (const auto& [o, m] : t.layer(0)) layer += m.get_d() * std::exp(pair(alg, t.weight(0, o), s));
    CHECK(eval_character_at_depth(alg, l, s, 0).value == doctest::Approx(layer).epsilon(1e-14));
  }
}

TEST_CASE("series and closed form agree within their bounds") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    for (long n : {1L, 3L, 5L}) {
      const Specialization s = rho_specialization(alg, n);
      for (const Weight& l : {alg.lambda0(), alg.fundamental(1), alg.rho()}) {
        const EvalResult a = eval_character(alg, l, s, 1e-12);
        const EvalResult b = eval_character_closed(alg, l, s, 1e-13);
        CHECK(a.value > std::exp(pair(alg, l, s)));
        CHECK(b.value > 0);
        CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-14 * b.value);
      }
    }
  }
}

TEST_CASE("series at depths D and D+10 agree within the tail bound") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 5);
  const EvalResult lo = eval_character_at_depth(alg, alg.lambda0(), s, 25);
  const EvalResult hi = eval_character_at_depth(alg, alg.lambda0(), s, 35);
  REQUIRE(std::isfinite(lo.tail_bound));
  CHECK(hi.value >= lo.value);
  CHECK(hi.value - lo.value <= lo.tail_bound);
}

TEST_CASE("ratio error propagation") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 3);
  const Weight lambda = alg.lambda0(), beta = alg.from_pairings({1, 2});
  const EvalResult l_lo = eval_character(alg, lambda, s, 1e-5), b_lo = eval_character(alg, beta, s, 1e-5);
  const EvalResult l_hi = eval_character(alg, lambda, s, 1e-14), b_hi = eval_character(alg, beta, s, 1e-14);
  const double r_lo = b_lo.value / l_lo.value, r_hi = b_hi.value / l_hi.value;
  const double bound = l_lo.tail_bound / l_lo.value + b_lo.tail_bound / b_lo.value;
  CHECK(std::abs(r_lo - r_hi) / r_hi <= bound + l_hi.tail_bound / l_hi.value + b_hi.tail_bound / b_hi.value);
}

TEST_CASE("denominator identity") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    for (long n : {1L, 5L, 10L}) {
      const Specialization s = rho_specialization(alg, n);
      CHECK(denominator_residual(alg, s, 20) < 1e-8);
      for (long d : {2L, 6L, 10L}) {
        const DenominatorCheck a = denominator_check(alg, s, d), b = denominator_check(alg, s, d + 5);
        CHECK(b.residual <= std::max(a.residual, 10 * b.noise_floor));
      }
    }
    const DenominatorCheck zero = denominator_check(alg, rho_specialization(alg, 1), 0);
    CHECK(std::isfinite(zero.residual));
  }
}

TEST_CASE("theta functions") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 2);
  const Weight lambda = alg.from_pairings({1, 2});
  const EvalResult r0 = eval_theta_radius(alg, lambda, s, 0);
  const double k = to_double(lambda.k);
  const double expect = std::exp(-to_double(alg.inner(lambda, lambda)) / (2 * k) * pair(alg, alg.delta(), s) +
                                 pair(alg, lambda, s));
  CHECK(r0.value == doctest::Approx(expect).epsilon(1e-14));

  const EvalResult a = eval_theta(alg, lambda, s, 1e-13);
  const Weight shifted = lambda + lambda.k * alg.alpha(1) -
                         (alg.inner(lambda, alg.alpha(1)) + lambda.k) * alg.delta();
  const EvalResult b = eval_theta(alg, shifted, s, 1e-13);
  CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-13 * a.value);

  // growing radius only adds positive terms and stays under the envelope
  double prev = 0;
  for (double r : {0.0, 1.5, 3.0, 4.5, 6.0}) {
    const EvalResult e = eval_theta_radius(alg, lambda, s, r);
    CHECK(e.value >= prev);
    CHECK(a.value - e.value <= e.tail_bound + 1e-13 * a.value);
    prev = e.value;
  }
}

TEST_CASE("theta bridge to the alternating Weyl sum") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    const Specialization s = rho_specialization(alg, 2);
    for (const Weight& l : {alg.rho(), alg.rho() + alg.lambda0()}) {
      const BridgeCheck b = theta_bridge(alg, l, s, 1e-14);
      CHECK(std::abs(b.lhs - b.rhs) <= b.tail + 1e-12 * b.scale);
    }
  }
}

TEST_CASE("twisted ratios") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Specialization s = rho_specialization(alg, 2);
  const TwistedRatio r = twisted_character_ratio(alg, alg.lambda0(), s, {0});
  CHECK(std::abs(r.value - std::complex<double>(1, 0)) <= r.abs_error + 1e-14);
  const TwistedRatio h = twisted_character_ratio(alg, alg.lambda0(), s, {Rational(1, 2)});
  CHECK(std::abs(h.value) <= 1 + h.abs_error);
}
