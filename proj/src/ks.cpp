#include "condex/ks.hpp"

#include <algorithm>
#include <cmath>

#include "condex/errors.hpp"

namespace condex::ks {

double statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InsufficientDataError("ks statistic: empty sample", 0);
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw InsufficientDataError("ks two-sample statistic: empty sample", 0);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double z = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= z) ++i;
    while (j < b.size() && b[j] <= z) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double critical_value(std::size_t n, double level) {
  if (n == 0) throw DomainError("ks critical value: n must be positive");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("ks critical value: level in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * level)) / std::sqrt(static_cast<double>(n));
}

double two_sample_critical_value(std::size_t n, std::size_t m, double level) {
  if (n == 0 || m == 0) throw DomainError("ks critical value: sizes must be positive");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return critical_value(1, level) * std::sqrt((nd + md) / (nd * md));
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double p_value(double d, std::size_t n) {
  if (n == 0) throw DomainError("ks p-value: n must be positive");
  const double root = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
}

double two_sample_p_value(double d, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw DomainError("ks p-value: sizes must be positive");
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  return kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
}

}  // namespace condex::ks
