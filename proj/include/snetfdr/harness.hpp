#pragma once

// Seeded Monte Carlo runner for the seven experiments, their config-file
// binding and the CSV writer.
//
// Randomness: iteration `it` draws its data from Rng(seed, it, kDataStream)
// and its transform dither from its own stream, at every sweep point. Sweep
// points therefore share random numbers, which keeps adjacent-point
// comparisons low-variance, and the outcome of an iteration does not depend
// on which thread ran it.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snetfdr/config.hpp"
#include "snetfdr/distributed.hpp"
#include "snetfdr/field.hpp"
#include "snetfdr/measure.hpp"
#include "snetfdr/procedures.hpp"
#include "snetfdr/types.hpp"

namespace snetfdr {

enum class ExperimentId { E1 = 1, E2, E3, E4, E5, E6, E7 };

struct ExperimentInfo {
  ExperimentId id;
  std::string_view key;             // "E3"
  std::string_view name;            // "transforms"
  std::string_view sweep_variable;  // "density"
  std::string_view description;
};

std::span<const ExperimentInfo> experiment_catalog() noexcept;
const ExperimentInfo& experiment_info(ExperimentId id) noexcept;
/// Accepts the key ("E3", "e3") or the name ("transforms").
ExperimentId parse_experiment_id(std::string_view text);

enum class Metric { fdr, error_rate, power, messages, messages_over_m1, v_geq_1_rate };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view text);
std::vector<Metric> all_metrics();

struct ExperimentSpec {
  ExperimentId id = ExperimentId::E1;
  std::vector<double> sweep;
  std::size_t iterations = 5000;
  std::uint64_t seed = 1;
  std::vector<double> gammas{0.1};
  std::vector<Metric> metrics = all_metrics();
  std::string output;  // empty: standard output

  // Synthetic experiments (E1-E4).
  std::size_t sensors = 1000;
  std::size_t null_sensors = 700;  // E2 only; E1/E3/E4 derive it from the density
  std::vector<double> null_mean{0.0, 0.0, 0.0};
  std::vector<double> sig_mean{1.5, 1.5, 1.5};
  double sigma = 1.0;
  double sigma0 = 1.0;  // E1 scale model
  double sigma1 = 2.0;

  TransformKind transform = TransformKind::chi;  // ignored by E3
  std::size_t mc_samples = 100000;

  // Field experiments (E5-E7).
  FieldConfig field;
  double density = 0.1;        // E6
  std::size_t objects = 15;    // E7
  NominalNull nominal_null = NominalNull::noise_only;
  StoppingRule rule = PresetK{20};  // E5-E7 distributed BH
};

ExperimentSpec default_spec(ExperimentId id);
void validate(const ExperimentSpec& spec);

/// Builds a spec from a parsed config. Every unknown key, misplaced key or
/// bad value is reported with its line; all of them are collected before
/// the ConfigFileError is thrown.
ExperimentSpec spec_from_config(const ConfigDocument& doc);

/// Procedure labels in the order the simulation stores them.
std::vector<std::string> procedure_names(const ExperimentSpec& spec);

struct RunSample {
  OutcomeTable table;
  std::size_t messages = 0;
};

/// Raw per-iteration outcomes, indexed by (sweep point, gamma, procedure,
/// iteration) with the iteration innermost.
struct SimulationResult {
  std::vector<std::string> procedures;
  std::size_t points = 0;
  std::size_t gammas = 0;
  std::size_t iterations = 0;
  std::vector<RunSample> samples;

  std::span<const RunSample> series(std::size_t point, std::size_t gamma,
                                    std::size_t procedure) const;
  std::size_t procedure_index(std::string_view name) const;
};

SimulationResult simulate(const ExperimentSpec& spec, Execution exec = Execution::parallel);

struct MetricSummary {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n); NaN when n < 2
  std::size_t n = 0;
};

/// Metric of one series. messages_over_m1 skips runs with m1 = 0.
MetricSummary summarize(std::span<const RunSample> series, Metric metric);
/// Mean and standard error of a per-run value.
MetricSummary summarize_values(std::span<const double> values);
double metric_value(const RunSample& s, Metric metric);

struct ResultRow {
  std::string experiment;
  std::string sweep_variable;
  double sweep_value = 0.0;
  double gamma = 0.0;
  std::string procedure;
  Metric metric = Metric::fdr;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t iterations = 0;
};

std::vector<ResultRow> result_rows(const ExperimentSpec& spec, const SimulationResult& sim);
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      Execution exec = Execution::parallel);

inline constexpr int kCsvSchemaVersion = 1;

/// Header comment with the schema version and run metadata, a column line,
/// then one line per row.
void write_csv(std::ostream& out, const ExperimentSpec& spec, std::span<const ResultRow> rows);

/// Writes to spec.output, or to `out` when the spec has no output path.
void emit_results(const ExperimentSpec& spec, std::span<const ResultRow> rows,
                  std::ostream& fallback);

}  // namespace snetfdr
