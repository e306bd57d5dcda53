#pragma once

// Square sensor grid with objects at grid-square centers. Observations follow
// the path-loss superposition x_s = sum_t theta_t / ((d(s,t)/d_min)^alpha + 1)
// + noise; alpha = +infinity selects the ideal (infinite attenuation) limit.

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <vector>

#include "snetfdr/measure.hpp"
#include "snetfdr/rng.hpp"
#include "snetfdr/types.hpp"

namespace snetfdr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

/// Nominal null used to build the transform at each sensor.
enum class NominalNull {
  noise_only,      // N(0, noise)
  distant_object,  // mean = signal of one object at the second-nearest grid distance
};

/// Mean of the nominal significant density.
enum class SignificantNominal {
  path_loss_gain,  // theta * gain(d0): what a vicinity sensor actually receives
  literal_theta,   // theta
};

struct FieldConfig {
  std::size_t n = 25;  // grid side, m = n^2 sensors
  double spacing = 4.0;
  double d0 = 2.0 * std::numbers::sqrt2;
  double d_min = 2.0 * std::numbers::sqrt2;
  double alpha = 2.0;  // +infinity for the ideal model
  std::vector<double> theta{2.0, 2.0, 2.0};
  double noise_sigma = 1.0;
  std::size_t object_count = 0;
  bool sparse = true;  // at most one object within d0 of any sensor
  SignificantNominal sig_nominal = SignificantNominal::path_loss_gain;
  std::size_t max_placement_attempts = 100000;

  std::size_t sensor_count() const noexcept { return n * n; }
  std::size_t center_count() const noexcept { return (n - 1) * (n - 1); }
  bool ideal() const noexcept { return std::isinf(alpha); }
  void validate() const;
};

/// 1 / ((d/d_min)^alpha + 1); for alpha = +inf the pointwise limit
/// (1 inside d_min, 1/2 on it, 0 outside).
double path_gain(double d, double d_min, double alpha) noexcept;

/// Distance from a square center to the second ring of sensors,
/// sqrt(1.5^2 + 0.5^2) * spacing (sqrt(40) at spacing 4).
double second_nearest_distance(const FieldConfig& config) noexcept;

std::vector<Vec2> sensor_positions(const FieldConfig& config);
std::vector<Vec2> square_centers(const FieldConfig& config);

/// Uniform sample of object_count distinct centers. With `sparse`, whole
/// configurations are redrawn until no sensor has two objects within d0.
std::vector<Vec2> place_objects(const FieldConfig& config, Rng& rng);

/// H1 iff some object lies within d0.
Labels label_sensors(const FieldConfig& config, const std::vector<Vec2>& objects);

struct FieldRealization {
  std::vector<Vec2> sensors;
  std::vector<Vec2> objects;
  Labels labels;
  ObservationMatrix observations;
  std::size_t significant_count() const noexcept;
};

/// Noise-free received signal at every sensor (m x d).
ObservationMatrix received_signal(const FieldConfig& config, const std::vector<Vec2>& sensors,
                                  const std::vector<Vec2>& objects);

/// Received signal plus isotropic Gaussian noise.
ObservationMatrix observe(const FieldRealization& field, const FieldConfig& config, Rng& rng);

/// Placement, labels and observations in one draw.
FieldRealization realize(const FieldConfig& config, Rng& rng);

/// Nominal null/significant pair every sensor uses for its transform.
ObservationModel nominal_model(const FieldConfig& config, NominalNull variant);

/// Per-sensor true models for the Bayes oracle: null = N(interference, noise),
/// significant = null mean shifted by theta * gain(d0). The interference is
/// the signal from every object farther than d0.
std::vector<ObservationModel> oracle_models(const FieldConfig& config,
                                            const FieldRealization& field);

/// Object count that makes a fraction `density` of sensors significant when
/// each isolated object covers its four corner sensors.
std::size_t objects_for_density(const FieldConfig& config, double density);

/// Plain-text dump of positions and labels.
void dump_realization(std::ostream& out, const FieldConfig& config,
                      const FieldRealization& field);

}  // namespace snetfdr
