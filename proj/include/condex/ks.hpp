#pragma once

// Kolmogorov-Smirnov statistics, asymptotic critical values and p-values.

#include <cstddef>
#include <functional>
#include <vector>

namespace condex::ks {

// sup |F_n - F| for the sample against a continuous CDF.
double statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

double two_sample_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic critical value sqrt{-log(level/2)/2}/sqrt(n); 1.6276/sqrt(n) at 1%.
double critical_value(std::size_t n, double level = 0.01);
double two_sample_critical_value(std::size_t n, std::size_t m, double level = 0.01);

// Kolmogorov tail probability Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

// p-values with Stephens' finite-sample correction of lambda.
double p_value(double d, std::size_t n);
double two_sample_p_value(double d, std::size_t n, std::size_t m);

}  // namespace condex::ks
