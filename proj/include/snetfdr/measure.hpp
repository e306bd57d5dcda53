#pragma once

// Observation models, likelihood ratios and the level-set transforms that map
// a d-dimensional observation to a scalar statistic in [0, 1].

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "snetfdr/rng.hpp"
#include "snetfdr/types.hpp"

namespace snetfdr {

using Point = std::span<const double>;
using DensityFn = std::function<double(Point)>;
using SamplerFn = std::function<void(Rng&, std::span<double>)>;

class ObservationModel;

/// N(null_mean, sigma^2 I) versus N(sig_mean, sigma^2 I).
struct GaussianMeanShift {
  std::vector<double> null_mean;
  std::vector<double> sig_mean;
  double sigma = 1.0;
};

/// N(0, sigma0^2) versus N(0, sigma1^2) in one dimension.
struct GaussianScale1d {
  double sigma0 = 1.0;
  double sigma1 = 1.0;
};

/// Arbitrary density/sampler pair. Transforms fall back to Monte Carlo.
struct GenericModel {
  std::size_t dim = 1;
  DensityFn null_density;
  DensityFn sig_density;
  SamplerFn null_sampler;
  SamplerFn sig_sampler;
  /// Optional per-coordinate marginal models; present iff the model factorizes.
  std::function<ObservationModel(std::size_t)> marginal;
  /// Integration range for one-dimensional quadrature.
  std::optional<std::pair<double, double>> support;
};

enum class ModelKind { gaussian_mean_shift, gaussian_scale_1d, generic };

/// A null/significant density pair for one sensor.
class ObservationModel {
 public:
  static ObservationModel gaussian_mean_shift(std::vector<double> null_mean,
                                              std::vector<double> sig_mean,
                                              double sigma = 1.0);
  static ObservationModel gaussian_scale_1d(double sigma0, double sigma1);
  static ObservationModel generic(GenericModel model);

  ModelKind kind() const noexcept;
  std::size_t dim() const noexcept;

  double log_null_density(Point x) const;
  double log_sig_density(Point x) const;
  double null_density(Point x) const;
  double sig_density(Point x) const;

  void sample_null(Rng& rng, std::span<double> out) const;
  void sample_sig(Rng& rng, std::span<double> out) const;

  /// Same densities and samplers, but stripped of the closed-form tag so
  /// every transform takes the Monte Carlo path.
  ObservationModel as_generic() const;

  bool factorizable() const noexcept;
  /// One-dimensional marginal pair of coordinate j. Requires factorizable().
  ObservationModel marginal(std::size_t j) const;

  const GaussianMeanShift* mean_shift() const noexcept {
    return std::get_if<GaussianMeanShift>(&family_);
  }
  const GaussianScale1d* scale_1d() const noexcept {
    return std::get_if<GaussianScale1d>(&family_);
  }
  const GenericModel* generic_model() const noexcept {
    return std::get_if<GenericModel>(&family_);
  }

 private:
  using Family = std::variant<GaussianMeanShift, GaussianScale1d, GenericModel>;
  explicit ObservationModel(Family f) : family_(std::move(f)) {}

  Family family_;
};

enum class TransformKind { chi, radial, per_dimension };

std::string_view to_string(TransformKind kind) noexcept;

/// Knobs for the Monte Carlo fallback and the tie dither.
struct TransformOptions {
  /// Null samples drawn per generic-model transform call. Each call costs
  /// mc_samples density evaluations, which is why closed forms are preferred.
  std::size_t mc_samples = 100000;
  /// Boundary mass below which no dither is added.
  double dither_tolerance = 1e-12;
  /// Execution of the Monte Carlo inner loops.
  Execution execution = Execution::parallel;
};

/// phi(x) = g1(x) / g0(x). Throws DomainError where g0(x) == 0.
double likelihood_ratio(const ObservationModel& model, Point x);
double log_likelihood_ratio(const ObservationModel& model, Point x);

/// Null measure of the strict super-level set {z : phi(z) > phi(x)}, plus a
/// uniform dither on the boundary mass when phi is locally constant.
double chi_transform(const ObservationModel& model, Point x, Rng& rng,
                     const TransformOptions& opts = {});

/// Null measure of the sub-level set {z : g0(z) <= g0(x)}.
double radial_transform(const ObservationModel& model, Point x, Rng& rng,
                        const TransformOptions& opts = {});

/// Coordinate-wise chi statistics combined through the exact null CDF of
/// their product, so the result stays U[0, 1] under the null.
double per_dimension_transform(const ObservationModel& model, Point x, Rng& rng,
                               const TransformOptions& opts = {});

double apply_transform(TransformKind kind, const ObservationModel& model,
                       Point x, Rng& rng, const TransformOptions& opts = {});

/// P{U_1 * ... * U_d <= p} for independent U[0, 1] factors.
double product_of_uniforms_cdf(double p, std::size_t d);

struct FanoOptions {
  double relative_tolerance = 1e-6;
  unsigned max_depth = 15;
};

/// H(H | X) - 1/m in bits for a fair Bernoulli hypothesis and one
/// observation. Supports 1-D models and isotropic Gaussian mean shifts
/// (which reduce to 1-D along the mean difference).
double fano_lower_bound(const ObservationModel& model, std::size_t m,
                        const FanoOptions& opts = {});

/// The conditional entropy term alone, in bits.
double conditional_entropy_bits(const ObservationModel& model,
                                const FanoOptions& opts = {});

struct PerturbationCheckOptions {
  /// Evaluation grid for the empirical CDF; empty means {0.01, ..., 1.00}.
  std::vector<double> grid;
  /// Width of the Monte Carlo band in binomial standard deviations.
  double z = 4.0;
  /// Largest tolerated band half-width at y = 1/2.
  double max_slack = 0.01;
  TransformOptions transform;
};

/// Draws n samples from `perturbed`, maps them through the chi transform of
/// `reference`, and checks |F(y) - y| <= eps * y + slack(y) on the grid.
bool perturbed_null_check(const ObservationModel& reference,
                          const SamplerFn& perturbed, double eps, std::size_t n,
                          Rng& rng, const PerturbationCheckOptions& opts = {});

/// Smallest eps with |F(y) - y| <= eps * y over the grid points where the
/// expected count n*y is at least `min_expected_count`, F being the
/// empirical CDF of `statistics`.
double estimate_null_perturbation(std::span<const double> statistics,
                                  std::span<const double> grid,
                                  double min_expected_count = 100.0);

/// Monte Carlo consistency of a model: E0[phi] and E1[1/phi] should both be 1
/// when the densities integrate to one over a common support. Returns the
/// larger absolute deviation.
double model_consistency_error(const ObservationModel& model, std::size_t n,
                               Rng& rng);

/// Standard normal upper tail P{Z > t}.
double normal_sf(double t) noexcept;

}  // namespace snetfdr
