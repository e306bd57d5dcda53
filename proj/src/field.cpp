#include "snetfdr/field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "snetfdr/errors.hpp"

namespace snetfdr {
namespace {

// Grid distances like hypot(2, 2) vs 2*sqrt(2) differ in the last ulp.
constexpr double kDistanceSlack = 1e-12;

bool within(double d, double radius) noexcept { return d <= radius * (1.0 + kDistanceSlack); }

// Calls fn(sensor index) for every sensor within `radius` of p.
template <class Fn>
void for_sensors_near(const FieldConfig& c, Vec2 p, double radius, Fn&& fn) {
  const double s = c.spacing;
  const auto last = static_cast<long>(c.n) - 1;
  const long i0 = std::max(0L, static_cast<long>(std::ceil((p.x - radius) / s - 1e-9)));
  const long i1 = std::min(last, static_cast<long>(std::floor((p.x + radius) / s + 1e-9)));
  const long j0 = std::max(0L, static_cast<long>(std::ceil((p.y - radius) / s - 1e-9)));
  const long j1 = std::min(last, static_cast<long>(std::floor((p.y + radius) / s + 1e-9)));
  for (long i = i0; i <= i1; ++i) {
    for (long j = j0; j <= j1; ++j) {
      const Vec2 q{static_cast<double>(i) * s, static_cast<double>(j) * s};
      if (within(distance(p, q), radius)) fn(static_cast<std::size_t>(i) * c.n + static_cast<std::size_t>(j));
    }
  }
}

bool is_sparse(const FieldConfig& c, const std::vector<Vec2>& objects) {
  std::vector<unsigned char> hits(c.sensor_count(), 0);
  bool ok = true;
  for (const Vec2& o : objects) {
    for_sensors_near(c, o, c.d0, [&](std::size_t s) {
      if (++hits[s] > 1) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

std::vector<double> scaled_theta(const FieldConfig& c, double gain) {
  std::vector<double> v(c.theta.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = gain * c.theta[j];
  return v;
}

}  // namespace

void FieldConfig::validate() const {
  if (n < 2) throw ConfigError("grid side n must be at least 2");
  if (!(spacing > 0.0)) throw ConfigError("sensor spacing must be positive");
  if (!(d0 > 0.0)) throw ConfigError("sensing range d0 must be positive");
  if (!(d_min > 0.0) || !std::isfinite(d_min)) throw ConfigError("d_min must be positive");
  if (std::isnan(alpha) || alpha < 0.0) {
    throw ConfigError("attenuation exponent must be >= 0 or +inf for the ideal model");
  }
  if (theta.empty()) throw ConfigError("signal vector theta is empty");
  if (!(noise_sigma > 0.0)) throw ConfigError("noise sigma must be positive");
  if (object_count > center_count()) {
    throw ConfigError(fmt::format("{} objects requested but the grid has {} square centers",
                                  object_count, center_count()));
  }
}

double path_gain(double d, double d_min, double alpha) noexcept {
  const double ratio = d / d_min;
  if (std::isinf(alpha)) {
    if (std::abs(ratio - 1.0) <= kDistanceSlack) return 0.5;
    return ratio < 1.0 ? 1.0 : 0.0;
  }
  return 1.0 / (std::pow(ratio, alpha) + 1.0);
}

double second_nearest_distance(const FieldConfig& config) noexcept {
  return config.spacing * std::hypot(1.5, 0.5);
}

std::vector<Vec2> sensor_positions(const FieldConfig& config) {
  std::vector<Vec2> out;
  out.reserve(config.sensor_count());
  for (std::size_t i = 0; i < config.n; ++i) {
    for (std::size_t j = 0; j < config.n; ++j) {
      out.push_back({static_cast<double>(i) * config.spacing,
                     static_cast<double>(j) * config.spacing});
    }
  }
  return out;
}

std::vector<Vec2> square_centers(const FieldConfig& config) {
  std::vector<Vec2> out;
  out.reserve(config.center_count());
  for (std::size_t i = 0; i + 1 < config.n; ++i) {
    for (std::size_t j = 0; j + 1 < config.n; ++j) {
      out.push_back({(static_cast<double>(i) + 0.5) * config.spacing,
                     (static_cast<double>(j) + 0.5) * config.spacing});
    }
  }
  return out;
}

std::vector<Vec2> place_objects(const FieldConfig& config, Rng& rng) {
  config.validate();
  const std::size_t count = config.object_count;
  if (count == 0) return {};
  std::vector<Vec2> centers = square_centers(config);
  for (std::size_t attempt = 0; attempt < config.max_placement_attempts; ++attempt) {
    // Partial Fisher-Yates: the first `count` entries are a uniform subset.
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, centers.size() - 1);
      std::swap(centers[i], centers[pick(rng)]);
    }
    std::vector<Vec2> objects(centers.begin(),
                              centers.begin() + static_cast<std::ptrdiff_t>(count));
    if (!config.sparse || is_sparse(config, objects)) return objects;
  }
  throw PlacementError(fmt::format(
      "could not place {} objects on a {}x{} grid without two objects sharing a sensor "
      "after {} attempts",
      count, config.n, config.n, config.max_placement_attempts));
}

Labels label_sensors(const FieldConfig& config, const std::vector<Vec2>& objects) {
  Labels labels(config.sensor_count(), Hypothesis::null);
  for (const Vec2& o : objects) {
    for_sensors_near(config, o, config.d0,
                     [&](std::size_t s) { labels[s] = Hypothesis::significant; });
  }
  return labels;
}

std::size_t FieldRealization::significant_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), Hypothesis::significant));
}

ObservationMatrix received_signal(const FieldConfig& config, const std::vector<Vec2>& sensors,
                                  const std::vector<Vec2>& objects) {
  const std::size_t d = config.theta.size();
  ObservationMatrix signal(sensors.size(), d);
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    auto row = signal.row(s);
    for (const Vec2& o : objects) {
      const double g = path_gain(distance(sensors[s], o), config.d_min, config.alpha);
      if (g == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) row[j] += g * config.theta[j];
    }
  }
  return signal;
}

ObservationMatrix observe(const FieldRealization& field, const FieldConfig& config, Rng& rng) {
  ObservationMatrix x = received_signal(config, field.sensors, field.objects);
  std::normal_distribution<double> normal;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    for (double& v : x.row(s)) v += config.noise_sigma * normal(rng);
  }
  return x;
}

FieldRealization realize(const FieldConfig& config, Rng& rng) {
  FieldRealization f;
  f.sensors = sensor_positions(config);
  f.objects = place_objects(config, rng);
  f.labels = label_sensors(config, f.objects);
  f.observations = observe(f, config, rng);
  return f;
}

ObservationModel nominal_model(const FieldConfig& config, NominalNull variant) {
  config.validate();
  const double null_gain =
      variant == NominalNull::distant_object
          ? path_gain(second_nearest_distance(config), config.d_min, config.alpha)
          : 0.0;
  const double sig_gain = config.sig_nominal == SignificantNominal::literal_theta
                              ? 1.0
                              : path_gain(config.d0, config.d_min, config.alpha);
  return ObservationModel::gaussian_mean_shift(scaled_theta(config, null_gain),
                                               scaled_theta(config, sig_gain),
                                               config.noise_sigma);
}

std::vector<ObservationModel> oracle_models(const FieldConfig& config,
                                            const FieldRealization& field) {
  const std::size_t d = config.theta.size();
  const double near_gain = path_gain(config.d0, config.d_min, config.alpha);
  std::vector<ObservationModel> models;
  models.reserve(field.sensors.size());
  for (const Vec2& s : field.sensors) {
    std::vector<double> background(d, 0.0);
    for (const Vec2& o : field.objects) {
      const double dist = distance(s, o);
      if (within(dist, config.d0)) continue;
      const double g = path_gain(dist, config.d_min, config.alpha);
      for (std::size_t j = 0; j < d; ++j) background[j] += g * config.theta[j];
    }
    std::vector<double> sig = background;
    for (std::size_t j = 0; j < d; ++j) sig[j] += near_gain * config.theta[j];
    models.push_back(
        ObservationModel::gaussian_mean_shift(std::move(background), std::move(sig),
                                              config.noise_sigma));
  }
  return models;
}

std::size_t objects_for_density(const FieldConfig& config, double density) {
  if (!(density >= 0.0 && density <= 1.0)) {
    throw ConfigError(fmt::format("object density {} outside [0, 1]", density));
  }
  return static_cast<std::size_t>(
      std::llround(density * static_cast<double>(config.sensor_count()) / 4.0));
}

void dump_realization(std::ostream& out, const FieldConfig& config,
                      const FieldRealization& field) {
  fmt::print(out, "# snetfdr field n={} spacing={} d0={:.17g} d_min={:.17g} alpha={}\n",
             config.n, config.spacing, config.d0, config.d_min, config.alpha);
  for (std::size_t s = 0; s < field.sensors.size(); ++s) {
    fmt::print(out, "sensor {} {:.17g} {:.17g} {}\n", s, field.sensors[s].x,
               field.sensors[s].y, field.labels[s] == Hypothesis::significant ? "H1" : "H0");
  }
  for (std::size_t t = 0; t < field.objects.size(); ++t) {
    fmt::print(out, "object {} {:.17g} {:.17g}\n", t, field.objects[t].x, field.objects[t].y);
  }
}

}  // namespace snetfdr
