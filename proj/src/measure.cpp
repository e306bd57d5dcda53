#include "snetfdr/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "snetfdr/errors.hpp"
#include "snetfdr/kernels.hpp"

namespace snetfdr {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_pdf(double z) noexcept {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_isotropic_density(Point x, const std::vector<double>& mean,
                             double sigma) {
  double r2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double dz = (x[j] - mean[j]) / sigma;
    r2 += dz * dz;
  }
  const auto d = static_cast<double>(x.size());
  return -0.5 * r2 - d * (std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi));
}

void check_dim(const ObservationModel& model, Point x) {
  if (x.size() != model.dim()) {
    throw ConfigError(fmt::format("observation has {} coordinates, model expects {}",
                                  x.size(), model.dim()));
  }
}

double log_or_neg_inf(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

struct LevelMass {
  double above;
  double equal;
};

// Fraction of n null draws whose score is strictly above / equal to `level`.
LevelMass monte_carlo_level_mass(const ObservationModel& model,
                                 const std::function<double(Point)>& score,
                                 double level, Rng& rng,
                                 const TransformOptions& opts) {
  if (opts.mc_samples == 0) {
    throw ConfigError("Monte Carlo sample budget must be positive");
  }
  ObservationMatrix draws(opts.mc_samples, model.dim());
  for (std::size_t i = 0; i < draws.rows(); ++i) model.sample_null(rng, draws.row(i));
  std::vector<double> scores(draws.rows());
  evaluate_rows(draws, score, scores, opts.execution);
  const LevelCounts c = count_level_set(scores, level, opts.execution);
  const auto n = static_cast<double>(opts.mc_samples);
  return {static_cast<double>(c.above) / n, static_cast<double>(c.equal) / n};
}

double with_dither(double base, double boundary_mass, Rng& rng,
                   const TransformOptions& opts) {
  if (boundary_mass > opts.dither_tolerance) {
    base += boundary_mass * uniform_open01(rng);
  }
  return std::clamp(base, 0.0, 1.0);
}

// phi constant everywhere: the whole space is the boundary.
double pure_dither(Rng& rng) { return uniform_open01(rng); }

}  // namespace

double normal_sf(double t) noexcept {
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// ObservationModel

ObservationModel ObservationModel::gaussian_mean_shift(std::vector<double> null_mean,
                                                       std::vector<double> sig_mean,
                                                       double sigma) {
  if (null_mean.empty() || null_mean.size() != sig_mean.size()) {
    throw ConfigError("mean vectors must be non-empty and of equal length");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("noise sigma must be positive and finite");
  }
  return ObservationModel(
      GaussianMeanShift{std::move(null_mean), std::move(sig_mean), sigma});
}

ObservationModel ObservationModel::gaussian_scale_1d(double sigma0, double sigma1) {
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0)) {
    throw ConfigError("scale parameters must be positive");
  }
  return ObservationModel(GaussianScale1d{sigma0, sigma1});
}

ObservationModel ObservationModel::generic(GenericModel model) {
  if (model.dim == 0) throw ConfigError("generic model needs dim >= 1");
  if (!model.null_density || !model.sig_density || !model.null_sampler ||
      !model.sig_sampler) {
    throw ConfigError("generic model needs both densities and both samplers");
  }
  return ObservationModel(std::move(model));
}

ModelKind ObservationModel::kind() const noexcept {
  switch (family_.index()) {
    case 0: return ModelKind::gaussian_mean_shift;
    case 1: return ModelKind::gaussian_scale_1d;
    default: return ModelKind::generic;
  }
}

std::size_t ObservationModel::dim() const noexcept {
  if (const auto* g = mean_shift()) return g->null_mean.size();
  if (scale_1d()) return 1;
  return generic_model()->dim;
}

double ObservationModel::log_null_density(Point x) const {
  if (const auto* g = mean_shift()) return log_isotropic_density(x, g->null_mean, g->sigma);
  if (const auto* s = scale_1d()) return log_normal_pdf(x[0] / s->sigma0) - std::log(s->sigma0);
  return log_or_neg_inf(generic_model()->null_density(x));
}

double ObservationModel::log_sig_density(Point x) const {
  if (const auto* g = mean_shift()) return log_isotropic_density(x, g->sig_mean, g->sigma);
  if (const auto* s = scale_1d()) return log_normal_pdf(x[0] / s->sigma1) - std::log(s->sigma1);
  return log_or_neg_inf(generic_model()->sig_density(x));
}

double ObservationModel::null_density(Point x) const {
  if (const auto* g = generic_model()) return g->null_density(x);
  return std::exp(log_null_density(x));
}

double ObservationModel::sig_density(Point x) const {
  if (const auto* g = generic_model()) return g->sig_density(x);
  return std::exp(log_sig_density(x));
}

void ObservationModel::sample_null(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  if (const auto* g = mean_shift()) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = g->null_mean[j] + g->sigma * normal(rng);
  } else if (const auto* s = scale_1d()) {
    out[0] = s->sigma0 * normal(rng);
  } else {
    generic_model()->null_sampler(rng, out);
  }
}

void ObservationModel::sample_sig(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  if (const auto* g = mean_shift()) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = g->sig_mean[j] + g->sigma * normal(rng);
  } else if (const auto* s = scale_1d()) {
    out[0] = s->sigma1 * normal(rng);
  } else {
    generic_model()->sig_sampler(rng, out);
  }
}

bool ObservationModel::factorizable() const noexcept {
  if (const auto* g = generic_model()) return g->dim == 1 || static_cast<bool>(g->marginal);
  return true;
}

ObservationModel ObservationModel::marginal(std::size_t j) const {
  if (j >= dim()) throw ConfigError(fmt::format("coordinate {} out of range", j));
  if (const auto* g = mean_shift()) {
    return gaussian_mean_shift({g->null_mean[j]}, {g->sig_mean[j]}, g->sigma);
  }
  if (scale_1d()) return *this;
  const auto* g = generic_model();
  if (g->marginal) return g->marginal(j);
  if (g->dim == 1) return *this;
  throw UnsupportedModel("generic model does not factorize into marginals");
}

ObservationModel ObservationModel::as_generic() const {
  if (generic_model()) return *this;
  const ObservationModel closed = *this;
  GenericModel g;
  g.dim = dim();
  g.null_density = [closed](Point x) { return closed.null_density(x); };
  g.sig_density = [closed](Point x) { return closed.sig_density(x); };
  g.null_sampler = [closed](Rng& rng, std::span<double> out) { closed.sample_null(rng, out); };
  g.sig_sampler = [closed](Rng& rng, std::span<double> out) { closed.sample_sig(rng, out); };
  g.marginal = [closed](std::size_t j) { return closed.marginal(j).as_generic(); };
  if (const auto* ms = mean_shift(); ms && g.dim == 1) {
    const double lo = std::min(ms->null_mean[0], ms->sig_mean[0]);
    const double hi = std::max(ms->null_mean[0], ms->sig_mean[0]);
    g.support = std::pair{lo - 10.0 * ms->sigma, hi + 10.0 * ms->sigma};
  } else if (const auto* s = scale_1d()) {
    const double w = 10.0 * std::max(s->sigma0, s->sigma1);
    g.support = std::pair{-w, w};
  }
  return ObservationModel(std::move(g));
}

std::string_view to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::chi: return "chi";
    case TransformKind::radial: return "radial";
    case TransformKind::per_dimension: return "per_dimension";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Likelihood ratio and transforms

double log_likelihood_ratio(const ObservationModel& model, Point x) {
  check_dim(model, x);
  if (const auto* g = model.generic_model()) {
    const double g0 = g->null_density(x);
    if (!(g0 > 0.0)) {
      throw DomainError("null density vanishes at the query point; the significant "
                        "measure is not absolutely continuous there");
    }
    return log_or_neg_inf(g->sig_density(x)) - std::log(g0);
  }
  return model.log_sig_density(x) - model.log_null_density(x);
}

double likelihood_ratio(const ObservationModel& model, Point x) {
  if (const auto* g = model.generic_model()) {
    check_dim(model, x);
    const double g0 = g->null_density(x);
    if (!(g0 > 0.0)) {
      throw DomainError("null density vanishes at the query point; the significant "
                        "measure is not absolutely continuous there");
    }
    return g->sig_density(x) / g0;
  }
  return std::exp(log_likelihood_ratio(model, x));
}

double chi_transform(const ObservationModel& model, Point x, Rng& rng,
                     const TransformOptions& opts) {
  check_dim(model, x);
  if (const auto* g = model.mean_shift()) {
    // phi is increasing in delta'x, so the super-level set is a half-space.
    double norm2 = 0.0;
    double proj = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double delta = g->sig_mean[j] - g->null_mean[j];
      norm2 += delta * delta;
      proj += delta * (x[j] - g->null_mean[j]);
    }
    if (norm2 == 0.0) return pure_dither(rng);
    return normal_sf(proj / (g->sigma * std::sqrt(norm2)));
  }
  if (const auto* s = model.scale_1d()) {
    const double z = std::abs(x[0]) / (s->sigma0 * std::numbers::sqrt2);
    if (s->sigma1 > s->sigma0) return std::erfc(z);  // phi grows with |x|
    if (s->sigma1 < s->sigma0) return std::erf(z);   // phi shrinks with |x|
    return pure_dither(rng);
  }
  const double level = log_likelihood_ratio(model, x);
  const auto mass = monte_carlo_level_mass(
      model, [&model](Point z) { return log_likelihood_ratio(model, z); }, level, rng, opts);
  return with_dither(mass.above, mass.equal, rng, opts);
}

double radial_transform(const ObservationModel& model, Point x, Rng& rng,
                        const TransformOptions& opts) {
  check_dim(model, x);
  if (const auto* g = model.mean_shift()) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double dz = (x[j] - g->null_mean[j]) / g->sigma;
      r2 += dz * dz;
    }
    return boost::math::gamma_q(0.5 * static_cast<double>(x.size()), 0.5 * r2);
  }
  if (const auto* s = model.scale_1d()) {
    return std::erfc(std::abs(x[0]) / (s->sigma0 * std::numbers::sqrt2));
  }
  // {g0(z) <= g0(x)} is the strict super-level set of -log g0 plus its boundary.
  const double level = -model.log_null_density(x);
  const auto mass = monte_carlo_level_mass(
      model, [&model](Point z) { return -model.log_null_density(z); }, level, rng, opts);
  return with_dither(mass.above, mass.equal, rng, opts);
}

double product_of_uniforms_cdf(double p, std::size_t d) {
  if (d == 0) throw ConfigError("product of zero uniforms is undefined");
  if (!(p > 0.0)) return 0.0;
  if (p >= 1.0) return 1.0;
  // -log of the product is Gamma(d, 1).
  const double l = -std::log(p);
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 1; k < d; ++k) {
    term *= l / static_cast<double>(k);
    sum += term;
  }
  return std::min(1.0, p * sum);
}

double per_dimension_transform(const ObservationModel& model, Point x, Rng& rng,
                               const TransformOptions& opts) {
  check_dim(model, x);
  if (!model.factorizable()) {
    throw UnsupportedModel("per-dimension transform needs independent marginals");
  }
  const std::size_t d = model.dim();
  if (d == 1) return chi_transform(model, x, rng, opts);

  double product = 1.0;
  if (const auto* g = model.mean_shift()) {
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = g->sig_mean[j] - g->null_mean[j];
      double y;
      if (delta == 0.0) {
        y = pure_dither(rng);
      } else {
        const double t = (x[j] - g->null_mean[j]) / g->sigma;
        y = normal_sf(delta > 0.0 ? t : -t);
      }
      product *= y;
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      product *= chi_transform(model.marginal(j), x.subspan(j, 1), rng, opts);
    }
  }
  return product_of_uniforms_cdf(product, d);
}

double apply_transform(TransformKind kind, const ObservationModel& model, Point x,
                       Rng& rng, const TransformOptions& opts) {
  switch (kind) {
    case TransformKind::chi: return chi_transform(model, x, rng, opts);
    case TransformKind::radial: return radial_transform(model, x, rng, opts);
    case TransformKind::per_dimension: return per_dimension_transform(model, x, rng, opts);
  }
  throw ConfigError("unknown transform kind");
}

// ---------------------------------------------------------------------------
// Fano bound

namespace {

struct OneDimProblem {
  std::function<double(double)> log_g0;
  std::function<double(double)> log_g1;
  std::vector<double> breakpoints;  // sorted, includes both ends
};

OneDimProblem reduce_to_one_dim(const ObservationModel& model) {
  OneDimProblem p;
  if (const auto* g = model.mean_shift()) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < g->null_mean.size(); ++j) {
      const double delta = g->sig_mean[j] - g->null_mean[j];
      norm2 += delta * delta;
    }
    // Whitened projection onto the mean difference: N(0,1) vs N(sep,1).
    const double sep = std::sqrt(norm2) / g->sigma;
    p.log_g0 = [](double t) { return log_normal_pdf(t); };
    p.log_g1 = [sep](double t) { return log_normal_pdf(t - sep); };
    p.breakpoints = {-10.0, 0.0, 0.5 * sep, sep, 10.0 + sep};
  } else if (const auto* s = model.scale_1d()) {
    const double s0 = s->sigma0, s1 = s->sigma1;
    const double w = 10.0 * std::max(s0, s1);
    p.log_g0 = [s0](double t) { return log_normal_pdf(t / s0) - std::log(s0); };
    p.log_g1 = [s1](double t) { return log_normal_pdf(t / s1) - std::log(s1); };
    p.breakpoints = {-w, -std::min(s0, s1), 0.0, std::min(s0, s1), w};
  } else {
    const auto* g = model.generic_model();
    if (g->dim != 1) {
      throw UnsupportedModel("conditional entropy quadrature needs a 1-D generic model");
    }
    if (!g->support) {
      throw UnsupportedModel("generic model needs a support range for quadrature");
    }
    p.log_g0 = [g](double t) { return log_or_neg_inf(g->null_density(Point(&t, 1))); };
    p.log_g1 = [g](double t) { return log_or_neg_inf(g->sig_density(Point(&t, 1))); };
    const auto [lo, hi] = *g->support;
    p.breakpoints = {lo, 0.5 * (lo + hi), hi};
  }
  std::sort(p.breakpoints.begin(), p.breakpoints.end());
  p.breakpoints.erase(std::unique(p.breakpoints.begin(), p.breakpoints.end()),
                      p.breakpoints.end());
  return p;
}

}  // namespace

double conditional_entropy_bits(const ObservationModel& model, const FanoOptions& opts) {
  const OneDimProblem p = reduce_to_one_dim(model);
  // Mixture (g0 + g1)/2 times the binary entropy of the posterior.
  auto integrand = [&p](double t) {
    const double la = p.log_g0(t) - kLn2;
    const double lb = p.log_g1(t) - kLn2;
    const double hi = std::max(la, lb);
    if (hi == kNegInf) return 0.0;
    const double ls = hi + std::log1p(std::exp(std::min(la, lb) - hi));
    double h = 0.0;
    if (la != kNegInf) h -= std::exp(la) * (la - ls);
    if (lb != kNegInf) h -= std::exp(lb) * (lb - ls);
    return h / kLn2;
  };

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.breakpoints.size(); ++i) {
    const double a = p.breakpoints[i], b = p.breakpoints[i + 1];
    double err = 0.0, l1 = 0.0;
    const double v = Quad::integrate(integrand, a, b, opts.max_depth,
                                     opts.relative_tolerance, &err, &l1);
    if (!std::isfinite(v) || err > opts.relative_tolerance * l1 + 1e-15) {
      throw NumericError(fmt::format(
          "conditional entropy quadrature did not converge on [{:.6g}, {:.6g}]: "
          "value {:.10g}, error estimate {:.3g}, L1 {:.3g}, depth {}",
          a, b, v, err, l1, opts.max_depth));
    }
    total += v;
  }
  return total;
}

double fano_lower_bound(const ObservationModel& model, std::size_t m,
                        const FanoOptions& opts) {
  if (m == 0) throw ConfigError("number of tests m must be at least 1");
  return conditional_entropy_bits(model, opts) - 1.0 / static_cast<double>(m);
}

// ---------------------------------------------------------------------------
// Robustness checks

bool perturbed_null_check(const ObservationModel& reference, const SamplerFn& perturbed,
                          double eps, std::size_t n, Rng& rng,
                          const PerturbationCheckOptions& opts) {
  if (!(eps >= 0.0)) throw ConfigError("perturbation eps must be non-negative");
  if (n == 0 || opts.z * 0.5 / std::sqrt(static_cast<double>(n)) > opts.max_slack) {
    throw ConfigError(fmt::format(
        "{} samples cannot resolve the empirical CDF to within {} at z = {}", n,
        opts.max_slack, opts.z));
  }
  std::vector<double> grid = opts.grid;
  if (grid.empty()) {
    for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  }

  std::vector<double> x(reference.dim());
  std::vector<double> stats(n);
  for (std::size_t i = 0; i < n; ++i) {
    perturbed(rng, x);
    stats[i] = chi_transform(reference, x, rng, opts.transform);
  }
  std::sort(stats.begin(), stats.end());

  const auto nd = static_cast<double>(n);
  for (double y : grid) {
    const auto below = std::upper_bound(stats.begin(), stats.end(), y) - stats.begin();
    const double cdf = static_cast<double>(below) / nd;
    const double slack = opts.z * std::sqrt(y * (1.0 - y) / nd);
    if (std::abs(cdf - y) > eps * y + slack) return false;
  }
  return true;
}

double estimate_null_perturbation(std::span<const double> statistics,
                                  std::span<const double> grid,
                                  double min_expected_count) {
  std::vector<double> sorted(statistics.begin(), statistics.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double eps = 0.0;
  bool any = false;
  for (double y : grid) {
    if (!(y > 0.0) || n * y < min_expected_count) continue;
    any = true;
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
    eps = std::max(eps, std::abs(static_cast<double>(below) / n - y) / y);
  }
  if (!any) {
    throw ConfigError("no grid point has enough expected samples to estimate eps");
  }
  return eps;
}

double model_consistency_error(const ObservationModel& model, std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("consistency check needs samples");
  std::vector<double> x(model.dim());
  double null_mean_ratio = 0.0;
  double sig_mean_inverse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    model.sample_null(rng, x);
    null_mean_ratio += std::exp(model.log_sig_density(x) - model.log_null_density(x));
    model.sample_sig(rng, x);
    sig_mean_inverse += std::exp(model.log_null_density(x) - model.log_sig_density(x));
  }
  const auto nd = static_cast<double>(n);
  return std::max(std::abs(null_mean_ratio / nd - 1.0), std::abs(sig_mean_inverse / nd - 1.0));
}

}  // namespace snetfdr
