#include <doctest.h>

#include <cmath>
#include <random>

#include "affine/algebra.hpp"
#include "affine/diffusion.hpp"
#include "affine/error.hpp"
#include "affine/stats.hpp"
#include "affine/weyl.hpp"

using namespace affine;

namespace {

// interior point with pairings spread inside (lo, 1 - lo) of the level
SpaceTimePoint interior(const AffineAlgebra& alg, const SpaceTime& st, std::mt19937_64& g, double lo = 0.1) {
  std::uniform_int_distribution<long> lev(50, 300);
  const long s = lev(g);
  const std::size_t l = alg.rank();
  RationalVector p(l + 1);
  long left = s;
  for (std::size_t i = 1; i <= l; ++i) {
    const long cap = static_cast<long>((1 - lo) * s / l);
    std::uniform_int_distribution<long> u(static_cast<long>(lo * s / (l + 1)) + 1, cap);
    const long v = u(g);
    p[i] = make_rational(v, 100);
    left -= v * alg.comarks()[i];
  }
  p[0] = make_rational(left, 100);
  return st.from_weight(alg.from_pairings(p));
}

std::vector<AffineWeylElement> elements(const AffineAlgebra& alg) { return enumerate_bounded(alg, 3.0); }

}  // namespace

TEST_CASE("chamber membership") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  const ChamberTest c0 = chamber_test(alg, SpaceTimePoint{1, {0}});
  CHECK(c0.margin == doctest::Approx(0.0));
  CHECK_FALSE(chamber_test(alg, SpaceTimePoint{1, st.to_ortho({-0.1})}).inside);
  for (double t : {0.25, 1.0, 4.0}) {
    const ChamberTest c = st.chamber(st.from_weight(alg.rho()));
    CHECK(c.inside);
    const SpaceTimePoint x{2 * t, st.to_ortho({0.5 * t})};
    CHECK(st.chamber(x).margin == doctest::Approx(t));
  }
}

TEST_CASE("heat densities") {
  AffineAlgebra alg(cartan_by_name("A2~"));
  SpaceTime st(alg);
  const double t = 0.7;
  const SpaceTimePoint x{1.5, {0.2, -0.1}};
  SpaceTimePoint y{x.s + t * 3, {x.z[0] + t * st.rho()[0], x.z[1] + t * st.rho()[1]}};
  CHECK(st.heat_density(x, y, t, true) == doctest::Approx(1 / (2 * M_PI * t)).epsilon(1e-14));
  SpaceTimePoint bad = y;
  bad.s += 0.5;
  CHECK(st.heat_density(x, bad, t, true) == 0.0);
  y.z = {0.9, 0.4};
  const double ratio = st.heat_density(x, y, t, true) / st.heat_density(x, y, t, false);
  CHECK(ratio == doctest::Approx(st.girsanov_factor(x, y, t)).epsilon(1e-12));
  CHECK_THROWS_AS(st.heat_density(x, y, 0, true), DomainError);
}

TEST_CASE("survival probability") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  CHECK(std::abs(st.survival(SpaceTimePoint{1, {0}}).value) < 1e-12);
  CHECK(std::abs(st.survival(SpaceTimePoint{1, st.to_ortho({0.5})}).value) < 1e-12);
  const SpaceTimePoint far = st.from_weight(Rational(50) * alg.rho());
  CHECK(std::abs(st.survival(far).value - 1) < 1e-6);
  std::mt19937_64 g(2);
  for (int i = 0; i < 20; ++i) {
    const SpaceTimePoint x = interior(alg, st, g);
    const EvalResult r = st.survival(x);
    CHECK(r.value > 0);
    CHECK(r.value <= 1);
    // looser truncation stays within its own claimed bound
    const EvalResult loose = st.survival(x, 1e-5);
    CHECK(std::abs(loose.value - r.value) <= loose.tail_bound + r.tail_bound);
  }
  CHECK_THROWS_AS(st.survival(SpaceTimePoint{1, st.to_ortho({-0.5})}), DomainError);
}

TEST_CASE("survival gradient against finite differences") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    SpaceTime st(alg);
    std::mt19937_64 g(31);
    const double h = 1e-4;
    for (int i = 0; i < 20; ++i) {
      const SpaceTimePoint x = interior(alg, st, g);
      const GradientResult gr = st.survival_gradient(x);
      auto f = [&](SpaceTimePoint p) { return st.survival(p, 1e-16).value; };
      SpaceTimePoint a = x, b = x;
      a.s += h;
      b.s -= h;
      const double fd_s = (f(a) - f(b)) / (2 * h);
      double scale = std::abs(fd_s);
      double err = std::abs(fd_s - gr.ds);
      for (std::size_t j = 0; j < alg.rank(); ++j) {
        a = x;
        b = x;
        a.z[j] += h;
        b.z[j] -= h;
        const double fd = (f(a) - f(b)) / (2 * h);
        scale = std::max(scale, std::abs(fd));
        err = std::max(err, std::abs(fd - gr.dz[j]));
      }
      CHECK(err <= 1e-5 * scale + 1e-9);
    }
    const GradientResult flat = st.survival_gradient(st.from_weight(Rational(50) * alg.rho()));
    CHECK(std::abs(flat.ds) < 1e-6);
  }
}

TEST_CASE("reflected density routes agree") {
  for (const char* name : {"A1~", "A2~"}) {
    AffineAlgebra alg(cartan_by_name(name), name);
    SpaceTime st(alg);
    std::mt19937_64 g(41);
    for (int i = 0; i < 10; ++i) {
      const SpaceTimePoint x = interior(alg, st, g);
      const double t = 0.3 + 0.1 * i;
      SpaceTimePoint y = interior(alg, st, g);
      y.s = x.s + t * st.dual_coxeter();
      const DensityResult a = st.reflected_density(x, y, t, DensityMode::drifted_by_x);
      const DensityResult b = st.reflected_density(x, y, t, DensityMode::drifted_by_y);
      const DensityResult c = st.reflected_density(x, y, t, DensityMode::undrifted);
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
      CHECK(a.value == doctest::Approx(c.value).epsilon(1e-10));
      const DensityResult killed = st.killed_density_undrifted(x, y, t);
      CHECK(killed.value * st.girsanov_factor(x, y, t) == doctest::Approx(a.value).epsilon(1e-10));
      const DensityResult id = st.reflected_density(x, y, t, DensityMode::drifted_by_x, 1e-16, true);
      CHECK(id.value == doctest::Approx(st.heat_density(x, y, t, true)).epsilon(1e-13));
      CHECK(a.value <= id.value * (1 + 1e-12));
    }
  }
}

TEST_CASE("translated heat kernel identity") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  std::mt19937_64 g(5);
  std::uniform_int_distribution<long> u(-300, 300);
  const AffineWeylElement id{{0}, 0}, t1 = translation_element(alg, {1}), s1{{0}, 1};
  for (int i = 0; i < 20; ++i) {
    const Rational t = make_rational(1 + i, 4);
    const Weight x(make_rational(u(g) + 400, 100), {make_rational(u(g), 100)}, 0);
    const Weight y(x.k + t * 2, {make_rational(u(g), 100)}, 0);
    CHECK(wonpt_residual(alg, x, y, t, id) == 0.0);
    CHECK(wonpt_residual(alg, x, y, t, t1) < 1e-12);
    CHECK(wonpt_residual(alg, x, y, t, s1) < 1e-12);
  }
  for (const auto& w : elements(alg)) {
    const Weight x(3, {Rational(1, 3)}, 0), y(5, {Rational(-1, 7)}, 0);
    CHECK(wonpt_residual(alg, x, y, 1, w) < 1e-12);
  }
}

TEST_CASE("space-time harmonicity") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  std::mt19937_64 g(8);
  const AffineWeylElement id{{0}, 0}, s1{{0}, 1};
  for (int i = 0; i < 20; ++i) {
    const SpaceTimePoint p = interior(alg, st, g);
    CHECK(harmonic_residual(alg, id, p, 1e-3) == 0.0);
    CHECK(std::abs(harmonic_residual(alg, s1, p, 1e-3)) < 1e-5);
  }
}

TEST_CASE("unconditioned drift") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  SampleOptions opt;
  opt.t_max = 1;
  opt.dt = 1e-2;
  opt.n_paths = 10000;
  opt.seed = 77;
  opt.keep_points = false;
  opt.record_steps = {100};
  const SpaceTimePoint x0 = st.from_weight(alg.rho());
  const SampleSummary s = sample_paths(st, x0, opt);
  std::vector<double> inc;
  for (const auto& p : s.paths) {
    REQUIRE(p.points.size() == 1);
    inc.push_back(p.points[0].z[0] - x0.z[0]);
    CHECK(p.points[0].s == doctest::Approx(x0.s + 2.0));
  }
  CHECK(std::abs(mean(inc) - st.rho()[0]) < 3 * standard_error(inc));
  CHECK(variance(inc) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampler determinism and conditioning") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  const SpaceTimePoint x0 = st.from_weight(alg.rho());
  const auto a = sample_paths(alg, x0, 0.5, 1e-2, 20, 3, true);
  const auto b = sample_paths(alg, x0, 0.5, 1e-2, 20, 3, true);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].points.size() == b[i].points.size());
    for (std::size_t j = 0; j < a[i].points.size(); ++j) CHECK(a[i].points[j].z == b[i].points[j].z);
    CHECK_FALSE(a[i].aborted);
    for (const auto& p : a[i].points) CHECK(st.chamber(p).margin > 0);
  }
}

TEST_CASE("paths started on the wall exit at once as dt shrinks") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  const SpaceTimePoint wall{2, {0}};
  double prev = 0;
  for (double dt : {1e-3, 1e-5, 1e-7}) {
    SampleOptions opt;
    opt.t_max = 1e-3;
    opt.dt = dt;
    opt.n_paths = 2000;
    opt.seed = 5;
    opt.keep_points = false;
    const SampleSummary s = sample_paths(st, wall, opt);
    double exited = 0;
    for (const auto& p : s.paths) exited += p.exited_at ? 1 : 0;
    exited /= s.paths.size();
    CHECK(exited >= prev - 0.02);
    prev = exited;
  }
  CHECK(prev > 0.95);
}

TEST_CASE("exit probability and quadrature bracket the survival function") {
  AffineAlgebra alg(cartan_by_name("A1~"));
  SpaceTime st(alg);
  const SpaceTimePoint x0 = st.from_weight(alg.rho());
  const double h = st.survival(x0).value;
  double prev = 1;
  for (double t : {0.5, 1.0, 2.0, 8.0}) {
    const double q = survival_quadrature(st, x0, t);
    CHECK(q <= prev + 1e-9);
    CHECK(q >= h - 1e-9);
    prev = q;
  }
  const ExitEstimate e = exit_probability(st, x0, 1.0, 1e-3, 4000, 9);
  const double exact = 1 - survival_quadrature(st, x0, 1.0);
  CHECK(std::abs(e.p_extrapolated - exact) < 4 * e.se_extrapolated);
  CHECK(e.p_coarse <= e.p_fine);
}
