#include <doctest.h>

#include <random>

#include "affine/algebra.hpp"
#include "affine/error.hpp"

using namespace affine;

namespace {

Weight random_weight(const AffineAlgebra& alg, std::mt19937_64& g) {
  std::uniform_int_distribution<long> num(-12, 12), den(1, 4);
  RationalVector z(alg.rank());
  for (auto& x : z) x = make_rational(num(g), den(g));
  return Weight(make_rational(num(g), den(g)), z, make_rational(num(g), den(g)));
}

}  // namespace

TEST_CASE("A1 affine data") {
  AffineAlgebra alg(cartan_by_name("A1~"), "A1~");
  CHECK(alg.rank() == 1);
  CHECK(alg.marks() == IntVector{1, 1});
  CHECK(alg.comarks() == IntVector{1, 1});
  CHECK(alg.coxeter() == 2);
  CHECK(alg.dual_coxeter() == 2);
  CHECK(alg.untwisted());
  const auto& G = alg.gram_hstar();
  // basis order (Lambda0, alpha_1, delta)
  CHECK(G[2][0] == 1);
  CHECK(G[2][2] == 0);
  CHECK(alg.inner(alg.alpha(1), alg.alpha(1)) == 2);
  CHECK(alg.inner(alg.lambda0(), Weight::zero(1)) == 0);
}

TEST_CASE("delta is orthogonal to every simple root") {
  for (const char* name : {"A1~", "A2~", "A3~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    for (std::size_t i = 0; i <= alg.rank(); ++i) CHECK(alg.inner(alg.delta(), alg.alpha(i)) == 0);
    CHECK(alg.inner(alg.delta(), alg.lambda0()) == 1);
  }
}

TEST_CASE("coroot pairings reproduce the Cartan matrix") {
  for (const char* name : {"A1~", "A2~", "A3~", "A4~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    for (std::size_t i = 0; i <= alg.rank(); ++i) {
      CHECK(alg.pairing(alg.lambda0(), i) == (i == 0 ? 1 : 0));
      CHECK(alg.pairing(alg.rho(), i) == 1);
      for (std::size_t j = 0; j <= alg.rank(); ++j) CHECK(alg.pairing(alg.alpha(j), i) == alg.entry(i, j));
    }
    CHECK(alg.rho().k == alg.dual_coxeter());
  }
}

TEST_CASE("Weyl vector of A1") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  CHECK(alg.rho() == Weight(2, {Rational(1, 2)}, 0));
  const Weight rb = alg.rho().barbar();
  CHECK(alg.inner(rb, rb) == Rational(1, 2));
}

TEST_CASE("fundamental weights are dual to the coroots") {
  AffineAlgebra alg(cartan_by_name("A3~"));
  for (std::size_t i = 0; i <= 3; ++i)
    for (std::size_t j = 0; j <= 3; ++j) CHECK(alg.pairing(alg.fundamental(i), j) == (i == j ? 1 : 0));
  const Weight w = alg.from_pairings({2, 0, 1, 3}, 5);
  CHECK(alg.pairings(w) == RationalVector{2, 0, 1, 3});
  CHECK(w.b == 5);
}

TEST_CASE("weight classification") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  auto c = alg.classify(alg.lambda0());
  CHECK(c.level == 1);
  CHECK(c.dominant);
  CHECK(c.integral);
  CHECK_FALSE(alg.classify(-alg.lambda0()).dominant);
  const Weight half(0, {Rational(1, 2)}, 0);
  CHECK(alg.pairing(half, 0) == -1);
  CHECK(alg.pairing(half, 1) == 1);
  c = alg.classify(half);
  CHECK(c.integral);
  CHECK_FALSE(c.dominant);
  CHECK_FALSE(alg.classify(Weight(0, {Rational(1, 3)}, 0)).integral);
}

TEST_CASE("random weights: level is pairing with delta, form is symmetric") {
  std::mt19937_64 g(11);
  for (const char* name : {"A1~", "A2~", "A3~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    for (int it = 0; it < 100; ++it) {
      const Weight a = random_weight(alg, g), b = random_weight(alg, g);
      CHECK(alg.inner(alg.delta(), a) == a.k);
      CHECK(alg.inner(a, b) == alg.inner(b, a));
      CHECK(alg.inner(a + b, b) == alg.inner(a, b) + alg.inner(b, b));
      CHECK(a.bar().bar() == a.bar());
      CHECK(a.barbar().barbar() == a.barbar());
      CHECK(a.bar().barbar() == a.barbar());
    }
  }
}

TEST_CASE("finite Gram block is symmetric positive definite") {
  for (const char* name : {"A1~", "A2~", "A3~", "A5~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    const auto& G = alg.finite_gram();
    for (std::size_t i = 0; i < G.size(); ++i)
      for (std::size_t j = 0; j < G.size(); ++j) CHECK(G[i][j] == G[j][i]);
    CHECK_NOTHROW(cholesky(alg.finite_gram_real()));
    const auto& H = alg.gram_hstar();
    for (std::size_t i = 0; i < H.size(); ++i)
      for (std::size_t j = 0; j < H.size(); ++j) CHECK(H[i][j] == H[j][i]);
  }
}

TEST_CASE("non-affine and malformed matrices are rejected") {
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{0, {{2}}}), NotAffineError);
  // finite A2
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{1, {{2, -1}, {-1, 2}}}), NotAffineError);
  // hyperbolic
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{1, {{2, -3}, {-3, 2}}}), NotAffineError);
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{1, {{2, 1}, {1, 2}}}), NotAffineError);
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{1, {{3, -2}, {-2, 2}}}), NotAffineError);
  CHECK_THROWS_AS(AffineAlgebra(CartanMatrix{2, {{2, -1, 0}, {-1, 2, -1}, {-1, 0, 2}}}), NotAffineError);
  CHECK_THROWS_AS(cartan_by_name("E9"), DomainError);
}

TEST_CASE("twisted A2 is affine but not untwisted") {
  AffineAlgebra alg(CartanMatrix{1, {{2, -4}, {-1, 2}}});
  CHECK(alg.marks() == IntVector{2, 1});
  CHECK(alg.comarks() == IntVector{1, 2});
  CHECK(alg.dual_coxeter() == 3);
  CHECK_FALSE(alg.untwisted());
  CHECK(alg.pairing(alg.rho(), 0) == 1);
  CHECK(alg.pairing(alg.rho(), 1) == 1);
}

TEST_CASE("Cartan matrix from JSON") {
  const CartanMatrix m = cartan_from_json(R"({"rank": 2, "matrix": [[2,-1,-1],[-1,2,-1],[-1,-1,2]]})");
  CHECK(m.rank == 2);
  CHECK(m.entries == affine_type_a(2).entries);
  CHECK_THROWS(cartan_from_json("{\"rank\": 2}"));
}

TEST_CASE("rational helpers") {
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("4") == 4);
  CHECK(to_string(make_rational(6, 4)) == "3/2");
  CHECK(primitive_integer({Rational(-2, 3), Rational(4, 3)}) == IntVector{1, -2});
  const IntMatrix h = hermite_normal_form({{2, 0}, {0, 2}, {1, 1}});
  CHECK(h == IntMatrix{{1, 1}, {0, 2}});
  CHECK(rank(RationalMatrix{{1, 2}, {2, 4}}) == 1);
  CHECK_THROWS_AS(inverse(RationalMatrix{{1, 2}, {2, 4}}), DomainError);
}
