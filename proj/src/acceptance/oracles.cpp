#include "snetfdr/acceptance/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snetfdr::oracle {

double ks_statistic_uniform(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double y = std::clamp(v[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - y, y - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Theta-function form converges fast for small x.
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * pi * pi / (8.0 * x * x));
    }
    return 1.0 - std::sqrt(2.0 * pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d);
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels < 2) panels = 2;
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return sum * h / 3.0;
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double conditional_entropy_bits(const std::function<double(double)>& g0,
                                const std::function<double(double)>& g1, double a, double b,
                                std::size_t panels) {
  auto integrand = [&](double x) {
    const double p0 = g0(x);
    const double p1 = g1(x);
    const double s = p0 + p1;
    if (s <= 0.0) return 0.0;
    double h = 0.0;
    if (p0 > 0.0) h -= p0 * std::log2(p0 / s);
    if (p1 > 0.0) h -= p1 * std::log2(p1 / s);
    return 0.5 * h;
  };
  return simpson(integrand, a, b, panels);
}

double empirical_cdf(std::span<const double> sorted, double y) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), y);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double relative_cdf_deviation(std::vector<double> values, std::span<const double> grid,
                              double min_count) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double worst = 0.0;
  for (double y : grid) {
    if (n * y < min_count) continue;
    worst = std::max(worst, std::abs(empirical_cdf(values, y) - y) / y);
  }
  return worst;
}

PairedDifference paired_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("paired difference needs two equal series of length >= 2");
  }
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace snetfdr::oracle
