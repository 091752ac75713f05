#pragma once

#include <functional>
#include <vector>

#include "affine/numeric.hpp"

namespace affine {

double mean(const std::vector<double>& x);
/// Unbiased sample variance.
double variance(const std::vector<double>& x);
double covariance(const std::vector<double>& x, const std::vector<double>& y);
double standard_error(const std::vector<double>& x);

double normal_cdf(double x, double mu = 0.0, double sigma = 1.0);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample statistic sup |F_a - F_b|; ties handled by stepping past equal values.
double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Asymptotic critical value c(alpha) * sqrt((n+m)/(n m)); alpha in {0.10, 0.05, 0.01, 0.001}.
double ks_critical(double alpha, std::size_t n, std::size_t m = 0);
/// Asymptotic p-value of the one-sample statistic at sample size n.
double ks_pvalue(double d, std::size_t n);

/// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, double k);

}  // namespace affine
