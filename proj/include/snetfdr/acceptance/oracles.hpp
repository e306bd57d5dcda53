#pragma once

// Reference computations used only for verification. None of them calls into
// the library's numerical code, so agreement is evidence rather than echo.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace snetfdr::oracle {

/// sup_y |F_n(y) - y| for a sample that should be U[0, 1].
double ks_statistic_uniform(std::span<const double> values);

/// P{K > x} for the limiting Kolmogorov distribution.
double kolmogorov_sf(double x);

/// Asymptotic KS p-value with Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels);

double normal_pdf(double x, double mean, double sd);
double normal_cdf(double x);

/// H(H | X) in bits for a fair coin between two densities, by Simpson
/// quadrature on [a, b].
double conditional_entropy_bits(const std::function<double(double)>& g0,
                                const std::function<double(double)>& g1, double a, double b,
                                std::size_t panels = 200000);

/// Fraction of `sorted` that is <= y.
double empirical_cdf(std::span<const double> sorted, double y);

/// max over grid points with n*y >= min_count of |F_n(y) - y| / y.
double relative_cdf_deviation(std::vector<double> values, std::span<const double> grid,
                              double min_count);

/// Mean and paired standard error of a - b over matched runs.
struct PairedDifference {
  double mean = 0.0;
  double std_error = 0.0;
};
PairedDifference paired_difference(std::span<const double> a, std::span<const double> b);

}  // namespace snetfdr::oracle
