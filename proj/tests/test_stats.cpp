#include <doctest.h>

#include <cmath>
#include <random>

#include "affine/error.hpp"
#include "affine/rng.hpp"
#include "affine/stats.hpp"

using namespace affine;

TEST_CASE("moments") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3));
  CHECK(covariance(x, y) == doctest::Approx(10.0 / 3));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(5.0 / 12)));
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(3, 1, 2) == doctest::Approx(normal_cdf(1)));
}

TEST_CASE("two-sample KS degenerate cases") {
  const std::vector<double> a{0.1, 0.5, 0.2, 0.9, 0.5};
  CHECK(ks_statistic(a, a) == 0.0);
  CHECK(ks_statistic(a, std::vector<double>{2, 3, 4}) == 1.0);
  CHECK(ks_statistic(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1}) == 0.0);
  CHECK(ks_statistic(std::vector<double>{0, 1}, std::vector<double>{1, 2}) == doctest::Approx(0.5));
}

TEST_CASE("one-sample KS calibration on uniforms") {
  const std::size_t n = 10000;
  const double crit = ks_critical(0.01, n);
  CHECK(crit == doctest::Approx(1.628 / 100));
  int below = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    std::mt19937_64 g = make_stream(2024, r);
    std::vector<double> u(n);
    for (auto& v : u) v = uniform01(g);
    const double d = ks_statistic(u, [](double v) { return std::clamp(v, 0.0, 1.0); });
    below += d < crit;
  }
  // binomial(200, 0.99): at least 194 with overwhelming probability
  CHECK(below >= 194);
}

TEST_CASE("KS p-value matches the critical values") {
  for (double alpha : {0.10, 0.05, 0.01}) {
    const std::size_t n = 1000000;
    CHECK(ks_pvalue(ks_critical(alpha, n), n) == doctest::Approx(alpha).epsilon(0.02));
  }
  CHECK(ks_pvalue(0, 10) == 1.0);
  CHECK_THROWS_AS(ks_critical(0.2, 10), DomainError);
}

TEST_CASE("chi-square tail") {
  CHECK(chi_square_sf(0, 3) == 1.0);
  CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("streams are independent of creation order") {
  std::mt19937_64 a = make_stream(1, 5);
  std::mt19937_64 b0 = make_stream(1, 4);
  std::mt19937_64 b = make_stream(1, 5);
  CHECK(a() == b());
  CHECK(make_stream(1, 5)() != make_stream(2, 5)());
  (void)b0;
}
