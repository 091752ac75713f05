#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "affine/algebra.hpp"
#include "affine/error.hpp"
#include "affine/weyl.hpp"

using namespace affine;

namespace {

Weight random_weight(const AffineAlgebra& alg, std::mt19937_64& g) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 3);
  RationalVector z(alg.rank());
  for (auto& x : z) x = make_rational(num(g), den(g));
  return Weight(make_rational(num(g), den(g)), z, make_rational(num(g), den(g)));
}

}  // namespace

TEST_CASE("finite group orders and signs") {
  AffineAlgebra a1(cartan_by_name("A1~")), a2(cartan_by_name("A2~")), a3(cartan_by_name("A3~"));
  const auto& f1 = finite_group(a1);
  REQUIRE(f1.size() == 2);
  CHECK(f1[0].sign == 1);
  CHECK(f1[1].sign == -1);
  CHECK(finite_group(a2).size() == 6);
  CHECK(finite_group(a3).size() == 24);
  for (const AffineAlgebra* alg : {&a1, &a2, &a3}) {
    int total = 0;
    for (const auto& e : finite_group(*alg)) {
      total += e.sign;
      CHECK(e.sign == ((e.word.size() % 2) ? -1 : 1));
    }
    CHECK(total == 0);
  }
}

TEST_CASE("simple reflections") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  CHECK(reflect(alg, 1, alg.alpha(1)) == -alg.alpha(1));
  CHECK(reflect(alg, 0, alg.lambda0()) == alg.lambda0() - alg.alpha(0));
  // fixed hyperplane
  const Weight w = alg.from_pairings({3, 0}, 1);
  CHECK(reflect(alg, 1, w) == w);
  CHECK_THROWS_AS(reflect(alg, 2, w), DomainError);
}

TEST_CASE("lattice basis") {
  AffineAlgebra a1(cartan_by_name("A1~"));
  CHECK(lattice_basis(a1) == IntMatrix{{1}});
  AffineAlgebra a2(cartan_by_name("A2~"));
  const IntMatrix& b = lattice_basis(a2);
  // theta-coroot orbit of A2 is the root system; its HNF is the identity
  IntMatrix orbit;
  for (const auto& r : a2.finite_roots()) orbit.push_back(r);
  CHECK(hermite_normal_form(orbit) == hermite_normal_form(b));
  for (const auto& row : b) {
    Weight v(0, to_rational(row), 0);
    CHECK(a2.inner(v, a2.delta()) == 0);
  }
}

TEST_CASE("translations") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const Weight t = translate(alg, {1}, alg.lambda0());
  CHECK(t == alg.lambda0() + alg.alpha(1) - alg.delta());
  // level zero weight orthogonal to alpha is fixed
  const Weight fixed(0, {0}, 3);
  CHECK(translate(alg, {2}, fixed) == fixed);
  std::mt19937_64 g(5);
  for (int i = 0; i < 20; ++i) {
    const Weight w = random_weight(alg, g);
    CHECK(translate(alg, {-3}, translate(alg, {3}, w)) == w);
  }
  CHECK_THROWS_AS(translate(alg, {Rational(1, 2)}, fixed), DomainError);
}

TEST_CASE("apply and enumeration") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  const AffineWeylElement id{{0}, 0}, s1{{0}, 1};
  CHECK(apply(alg, id, alg.rho()) == alg.rho());
  CHECK(apply(alg, s1, alg.rho()) == Weight(2, {Rational(-1, 2)}, 0));
  CHECK(enumerate_bounded(alg, 0).size() == 2);
  const auto e = enumerate_bounded(alg, 1.5);
  CHECK(e.size() == 6);
  std::set<long> ts;
  for (const auto& x : e) ts.insert(x.translation[0]);
  CHECK(ts == std::set<long>{-1, 0, 1});
  int total = 0;
  for (const auto& x : enumerate_bounded(alg, 7.3)) total += sign(alg, x);
  CHECK(total == 0);
}

TEST_CASE("form invariance, sign homomorphism, delta fixed") {
  std::mt19937_64 g(17);
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    const auto elems = enumerate_bounded(alg, 4.0);
    std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
    for (int it = 0; it < 100; ++it) {
      const auto& w = elems[pick(g)];
      const auto& v = elems[pick(g)];
      const Weight a = random_weight(alg, g), b = random_weight(alg, g);
      CHECK(alg.inner(apply(alg, w, a), apply(alg, w, b)) == alg.inner(a, b));
      CHECK(apply(alg, w, alg.delta()) == alg.delta());
      CHECK(apply(alg, w, a).k == a.k);
      const AffineWeylElement wv = compose(alg, w, v);
      CHECK(sign(alg, wv) == sign(alg, w) * sign(alg, v));
      CHECK(apply(alg, wv, a) == apply(alg, w, apply(alg, v, a)));
      CHECK(compose(alg, w, inverse(alg, w)) == AffineWeylElement{IntVector(alg.rank(), 0), 0});
    }
  }
}

TEST_CASE("positive level weights have a dominant representative") {
  std::mt19937_64 g(23);
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    std::uniform_int_distribution<long> c(-6, 6), lev(1, 4);
    for (int it = 0; it < 30; ++it) {
      RationalVector z(alg.rank());
      for (auto& x : z) x = c(g);
      const Weight lambda(lev(g), z, 0);
      // the translation part needed is at most |z|/k plus one alcove diameter
      const double radius = std::sqrt(alg.finite_inner(z, z).get_d()) / lambda.k.get_d() + 3.0;
      const auto elems = enumerate_bounded(alg, radius);
      const bool found = std::any_of(elems.begin(), elems.end(), [&](const AffineWeylElement& w) {
        return alg.classify(apply(alg, w, lambda)).dominant;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("reflections preserve the form and square to the identity") {
  AffineAlgebra alg(cartan_by_name("A3~"));
  std::mt19937_64 g(3);
  for (int it = 0; it < 40; ++it) {
    const Weight a = random_weight(alg, g), b = random_weight(alg, g);
    for (std::size_t i = 0; i <= 3; ++i) {
      CHECK(reflect(alg, i, reflect(alg, i, a)) == a);
      CHECK(alg.inner(reflect(alg, i, a), reflect(alg, i, b)) == alg.inner(a, b));
    }
  }
}

TEST_CASE("Gaussian tail bounds dominate the lattice sum") {
  AffineAlgebra alg(cartan_by_name("A2~"));
  const WeylGroup& grp = alg.weyl();
  const double a = 0.7, gl = 1.3, c = 0.2;
  for (double r : {1.0, 2.0, 3.5, 5.0}) {
    double tail = 0;
    for (const auto& v : grp.lattice_ball(14.0)) {
      const double n = std::sqrt(bilinear(to_real(grp.lattice_gram()), to_real(to_rational(v)), to_real(to_rational(v))));
      if (n > r) tail += std::exp(c + gl * n - a * n * n);
    }
    CHECK(tail <= std::exp(gaussian_tail_log(grp, a, gl, c, r)));
  }
  const double r = gaussian_tail_radius(grp, a, gl, c, -30.0);
  CHECK(gaussian_tail_log(grp, a, gl, c, r) <= -30.0);
  CHECK(r >= gl / (2 * a));
}
