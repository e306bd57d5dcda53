#include "snetfdr/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "snetfdr/errors.hpp"
#include "snetfdr/kernels.hpp"

namespace snetfdr {
namespace {

constexpr std::uint32_t kDataStream = 0xda7a;
constexpr std::size_t kDefaultPresetK = 20;

constexpr std::array<ExperimentInfo, 7> kCatalog{{
    {ExperimentId::E1, "E1", "scalar-density", "density",
     "150 scalar sensors, N(0,1) vs N(0,4); uncorrected, BH and Bayes oracle vs object density"},
    {ExperimentId::E2, "E2", "comm-cap", "cap",
     "m=1000, m0=700, N(0,1) vs N(3,1); distributed BH FDR under a message cap, per gamma"},
    {ExperimentId::E3, "E3", "transforms", "density",
     "m=1000, N(0,I3) vs N(1.5*1,I3); BH on the chi, radial and per-dimension statistics"},
    {ExperimentId::E4, "E4", "procedures", "density",
     "same data as E3; BH, Bonferroni, uncorrected and Bayes oracle on the chi statistic"},
    {ExperimentId::E5, "E5", "snet-density", "density",
     "25x25 field, alpha=2, theta=(2,2,2); distributed BH and baselines vs object density"},
    {ExperimentId::E6, "E6", "attenuation", "alpha",
     "25x25 field, theta=(1.5,1.5,1.5), density 0.1; error rate and messages vs alpha"},
    {ExperimentId::E7, "E7", "size", "m",
     "15 isolated objects (m1=60), alpha=2; messages per significant sensor vs field size"},
}};

constexpr std::array<std::string_view, 6> kMetricNames{
    "fdr", "error_rate", "power", "messages", "messages_over_m1", "v_geq_1_rate"};

bool is_synthetic(ExperimentId id) { return id <= ExperimentId::E4; }
bool is_field(ExperimentId id) { return id >= ExperimentId::E5; }

std::vector<double> range(double start, double step, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
  }
  return v;
}

std::size_t significant_for_density(std::size_t m, double density) {
  return static_cast<std::size_t>(std::llround(density * static_cast<double>(m)));
}

std::size_t grid_side_for(double m) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(m)));
  if (!(m >= 4.0) || static_cast<double>(n * n) != m) {
    throw ConfigError(fmt::format("field size m = {} is not a perfect square >= 4", m));
  }
  return n;
}

ObservationModel synthetic_model(const ExperimentSpec& spec) {
  if (spec.id == ExperimentId::E1) {
    return ObservationModel::gaussian_scale_1d(spec.sigma0, spec.sigma1);
  }
  return ObservationModel::gaussian_mean_shift(spec.null_mean, spec.sig_mean, spec.sigma);
}

FieldConfig field_at(const ExperimentSpec& spec, double sweep_value) {
  FieldConfig c = spec.field;
  switch (spec.id) {
    case ExperimentId::E5:
      c.object_count = objects_for_density(c, sweep_value);
      break;
    case ExperimentId::E6:
      c.alpha = sweep_value;
      c.object_count = objects_for_density(c, spec.density);
      break;
    case ExperimentId::E7:
      c.n = grid_side_for(sweep_value);
      c.object_count = spec.objects;
      break;
    default:
      break;
  }
  return c;
}

RejectionSet oracle_decisions(const ObservationMatrix& x, const ObservationModel& model,
                              std::size_t m1) {
  const std::size_t m = x.rows();
  if (m1 == 0) return {};
  if (m1 == m) {
    RejectionSet all;
    for (std::size_t s = 0; s < m; ++s) all.indices.push_back(s);
    return all;
  }
  return bayes_oracle(x, model, static_cast<double>(m1) / static_cast<double>(m));
}

RunSample centralized(const RejectionSet& r, std::span<const Hypothesis> truth) {
  RunSample s;
  s.table = outcome_table(r, truth);
  s.messages = r.size();
  return s;
}

StoppingRule cap_rule(double cap) {
  if (std::isinf(cap)) return RunToCompletion{};
  return CommCap{static_cast<std::size_t>(cap)};
}

class Simulator {
 public:
  Simulator(const ExperimentSpec& spec, SimulationResult& out) : spec_(spec), out_(out) {}

  void iteration(std::size_t it) {
    switch (spec_.id) {
      case ExperimentId::E1:
      case ExperimentId::E3:
      case ExperimentId::E4:
        synthetic_density(it);
        break;
      case ExperimentId::E2:
        comm_cap(it);
        break;
      default:
        field(it);
        break;
    }
  }

 private:
  RunSample& slot(std::size_t point, std::size_t g, std::size_t proc, std::size_t it) {
    const std::size_t procs = out_.procedures.size();
    return out_.samples[((point * out_.gammas + g) * procs + proc) * out_.iterations + it];
  }

  TransformOptions transform_options() const {
    TransformOptions o;
    o.mc_samples = spec_.mc_samples;
    o.execution = Execution::serial;
    return o;
  }

  std::vector<double> statistics(const ObservationModel& model, TransformKind kind,
                                 const ObservationMatrix& x, std::size_t it) const {
    std::vector<double> y(x.rows());
    transform_batch(model, kind, x, y, spec_.seed, static_cast<std::uint32_t>(it),
                    Execution::serial, transform_options());
    return y;
  }

  // First m1 sensors are significant. Both hypotheses consume the same
  // number of normal draws, so the noise is shared across densities.
  void draw(const ObservationModel& model, std::size_t m1, std::size_t it, ObservationMatrix& x,
            Labels& labels) const {
    Rng rng(spec_.seed, static_cast<std::uint32_t>(it), kDataStream);
    for (std::size_t s = 0; s < x.rows(); ++s) {
      if (s < m1) {
        model.sample_sig(rng, x.row(s));
        labels[s] = Hypothesis::significant;
      } else {
        model.sample_null(rng, x.row(s));
        labels[s] = Hypothesis::null;
      }
    }
  }

  void synthetic_density(std::size_t it) {
    const ObservationModel model = synthetic_model(spec_);
    const std::size_t m = spec_.sensors;
    ObservationMatrix x(m, model.dim());
    Labels labels(m);
    for (std::size_t p = 0; p < spec_.sweep.size(); ++p) {
      const std::size_t m1 = significant_for_density(m, spec_.sweep[p]);
      draw(model, m1, it, x, labels);

      if (spec_.id == ExperimentId::E3) {
        constexpr std::array kinds{TransformKind::chi, TransformKind::radial,
                                   TransformKind::per_dimension};
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          const auto y = statistics(model, kinds[k], x, it);
          for (std::size_t g = 0; g < spec_.gammas.size(); ++g) {
            slot(p, g, k, it) = centralized(bh_procedure(y, spec_.gammas[g]), labels);
          }
        }
        continue;
      }

      const auto y = statistics(model, spec_.transform, x, it);
      const RunSample oracle = centralized(oracle_decisions(x, model, m1), labels);
      for (std::size_t g = 0; g < spec_.gammas.size(); ++g) {
        const double gamma = spec_.gammas[g];
        if (spec_.id == ExperimentId::E1) {
          slot(p, g, 0, it) = centralized(uncorrected(y, gamma), labels);
          slot(p, g, 1, it) = centralized(bh_procedure(y, gamma), labels);
          slot(p, g, 2, it) = oracle;
        } else {
          slot(p, g, 0, it) = centralized(bh_procedure(y, gamma), labels);
          slot(p, g, 1, it) = centralized(bonferroni(y, gamma), labels);
          slot(p, g, 2, it) = centralized(uncorrected(y, gamma), labels);
          slot(p, g, 3, it) = oracle;
        }
      }
    }
  }

  void comm_cap(std::size_t it) {
    const ObservationModel model = synthetic_model(spec_);
    const std::size_t m = spec_.sensors;
    const std::size_t m1 = m - spec_.null_sensors;
    ObservationMatrix x(m, model.dim());
    Labels labels(m);
    draw(model, m1, it, x, labels);
    const auto y = statistics(model, spec_.transform, x, it);
    const auto order = rank_order(y);
    const DistributedOptions quiet{.record_rounds = false};
    for (std::size_t p = 0; p < spec_.sweep.size(); ++p) {
      const StoppingRule rule = cap_rule(spec_.sweep[p]);
      for (std::size_t g = 0; g < spec_.gammas.size(); ++g) {
        const auto run = run_distributed_bh_ranked(y, order, spec_.gammas[g], rule, quiet);
        RunSample& s = slot(p, g, 0, it);
        s.table = outcome_table(run.rejected, labels);
        s.messages = run.messages;
      }
    }
  }

  void field(std::size_t it) {
    const DistributedOptions quiet{.record_rounds = false};
    for (std::size_t p = 0; p < spec_.sweep.size(); ++p) {
      const FieldConfig config = field_at(spec_, spec_.sweep[p]);
      Rng rng(spec_.seed, static_cast<std::uint32_t>(it), kDataStream);
      const FieldRealization f = realize(config, rng);
      const ObservationModel nominal = nominal_model(config, spec_.nominal_null);
      const auto y = statistics(nominal, spec_.transform, f.observations, it);
      const std::size_t m = f.labels.size();
      const std::size_t m1 = f.significant_count();

      RunSample oracle;
      if (m1 == 0 || m1 == m) {
        RejectionSet r;
        if (m1 == m) {
          for (std::size_t s = 0; s < m; ++s) r.indices.push_back(s);
        }
        oracle = centralized(r, f.labels);
      } else {
        const auto models = oracle_models(config, f);
        oracle = centralized(bayes_oracle(f.observations, models,
                                          static_cast<double>(m1) / static_cast<double>(m)),
                             f.labels);
      }

      for (std::size_t g = 0; g < spec_.gammas.size(); ++g) {
        const double gamma = spec_.gammas[g];
        const auto run = run_distributed_bh(y, gamma, spec_.rule, quiet);
        RunSample& d = slot(p, g, 0, it);
        d.table = outcome_table(run.rejected, f.labels);
        d.messages = run.messages;
        slot(p, g, 1, it) = centralized(bonferroni(y, gamma), f.labels);
        slot(p, g, 2, it) = centralized(uncorrected(y, gamma), f.labels);
        slot(p, g, 3, it) = oracle;
      }
    }
  }

  const ExperimentSpec& spec_;
  SimulationResult& out_;
};

std::string format_list(std::span<const double> v) {
  std::string out;
  for (double x : v) {
    if (!out.empty()) out += ',';
    out += fmt::format("{:.12g}", x);
  }
  return out;
}

std::string rule_text(const StoppingRule& rule) {
  if (const auto* k = std::get_if<PresetK>(&rule)) return fmt::format("preset_k:{}", k->k);
  if (const auto* c = std::get_if<CommCap>(&rule)) return fmt::format("comm_cap:{}", c->cap);
  return "run_to_completion";
}

std::string_view nominal_text(NominalNull v) {
  return v == NominalNull::noise_only ? "noise_only" : "distant_object";
}

std::string_view sig_nominal_text(SignificantNominal v) {
  return v == SignificantNominal::path_loss_gain ? "path_loss_gain" : "literal_theta";
}

// ---------------------------------------------------------------------------
// Config binding

using Setter = std::function<void(ExperimentSpec&, const ConfigEntry&)>;

constexpr unsigned bit(ExperimentId id) { return 1u << static_cast<unsigned>(id); }
constexpr unsigned kAll = bit(ExperimentId::E1) | bit(ExperimentId::E2) | bit(ExperimentId::E3) |
                          bit(ExperimentId::E4) | bit(ExperimentId::E5) | bit(ExperimentId::E6) |
                          bit(ExperimentId::E7);
constexpr unsigned kSynthetic = bit(ExperimentId::E1) | bit(ExperimentId::E2) |
                                bit(ExperimentId::E3) | bit(ExperimentId::E4);
constexpr unsigned kField = bit(ExperimentId::E5) | bit(ExperimentId::E6) | bit(ExperimentId::E7);

struct KeyDef {
  std::string_view section;
  std::string_view key;
  unsigned experiments;
  Setter set;
};

std::size_t as_size(const ConfigEntry& e) { return static_cast<std::size_t>(parse_unsigned(e)); }

TransformKind parse_transform(const ConfigEntry& e) {
  for (auto k : {TransformKind::chi, TransformKind::radial, TransformKind::per_dimension}) {
    if (e.value == to_string(k)) return k;
  }
  throw ConfigError(fmt::format("key 'kind': unknown transform '{}' (chi, radial, per_dimension)",
                                e.value));
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"experiment", "id", kAll, [](ExperimentSpec&, const ConfigEntry&) {}},
      {"experiment", "seed", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.seed = parse_unsigned(e); }},
      {"experiment", "iterations", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.iterations = as_size(e); }},
      {"experiment", "gamma", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.gammas = parse_double_list(e); }},
      {"experiment", "metrics", kAll,
       [](ExperimentSpec& s, const ConfigEntry& e) {
         s.metrics.clear();
         for (const auto& w : parse_word_list(e)) s.metrics.push_back(parse_metric(w));
       }},
      {"experiment", "output", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.output = e.value; }},
      {"sweep", "variable", kAll,
       [](ExperimentSpec& s, const ConfigEntry& e) {
         const auto expected = experiment_info(s.id).sweep_variable;
         if (e.value != expected) {
           throw ConfigError(fmt::format("{} sweeps '{}', not '{}'", experiment_info(s.id).key,
                                         expected, e.value));
         }
       }},
      {"sweep", "values", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.sweep = parse_double_list(e); }},
      {"synthetic", "sensors", kSynthetic, [](ExperimentSpec& s, const ConfigEntry& e) { s.sensors = as_size(e); }},
      {"synthetic", "null_sensors", bit(ExperimentId::E2),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.null_sensors = as_size(e); }},
      {"synthetic", "null_mean", kSynthetic & ~bit(ExperimentId::E1),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.null_mean = parse_double_list(e); }},
      {"synthetic", "sig_mean", kSynthetic & ~bit(ExperimentId::E1),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.sig_mean = parse_double_list(e); }},
      {"synthetic", "sigma", kSynthetic & ~bit(ExperimentId::E1),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.sigma = parse_double(e); }},
      {"synthetic", "sigma0", bit(ExperimentId::E1),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.sigma0 = parse_double(e); }},
      {"synthetic", "sigma1", bit(ExperimentId::E1),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.sigma1 = parse_double(e); }},
      {"transform", "kind", kAll & ~bit(ExperimentId::E3),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.transform = parse_transform(e); }},
      {"transform", "mc_samples", kAll, [](ExperimentSpec& s, const ConfigEntry& e) { s.mc_samples = as_size(e); }},
      {"field", "n", bit(ExperimentId::E5) | bit(ExperimentId::E6),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.field.n = as_size(e); }},
      {"field", "spacing", kField, [](ExperimentSpec& s, const ConfigEntry& e) { s.field.spacing = parse_double(e); }},
      {"field", "d0", kField, [](ExperimentSpec& s, const ConfigEntry& e) { s.field.d0 = parse_double(e); }},
      {"field", "d_min", kField, [](ExperimentSpec& s, const ConfigEntry& e) { s.field.d_min = parse_double(e); }},
      {"field", "alpha", bit(ExperimentId::E5) | bit(ExperimentId::E7),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.field.alpha = parse_double(e); }},
      {"field", "theta", kField, [](ExperimentSpec& s, const ConfigEntry& e) { s.field.theta = parse_double_list(e); }},
      {"field", "noise_sigma", kField,
       [](ExperimentSpec& s, const ConfigEntry& e) { s.field.noise_sigma = parse_double(e); }},
      {"field", "sparse", kField, [](ExperimentSpec& s, const ConfigEntry& e) { s.field.sparse = parse_bool(e); }},
      {"field", "max_placement_attempts", kField,
       [](ExperimentSpec& s, const ConfigEntry& e) { s.field.max_placement_attempts = as_size(e); }},
      {"field", "density", bit(ExperimentId::E6),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.density = parse_double(e); }},
      {"field", "objects", bit(ExperimentId::E7),
       [](ExperimentSpec& s, const ConfigEntry& e) { s.objects = as_size(e); }},
      {"field", "nominal_null", kField,
       [](ExperimentSpec& s, const ConfigEntry& e) {
         if (e.value == "noise_only") {
           s.nominal_null = NominalNull::noise_only;
         } else if (e.value == "distant_object") {
           s.nominal_null = NominalNull::distant_object;
         } else {
           throw ConfigError(fmt::format(
               "key 'nominal_null': '{}' is not noise_only or distant_object", e.value));
         }
       }},
      {"field", "sig_nominal", kField,
       [](ExperimentSpec& s, const ConfigEntry& e) {
         if (e.value == "path_loss_gain") {
           s.field.sig_nominal = SignificantNominal::path_loss_gain;
         } else if (e.value == "literal_theta") {
           s.field.sig_nominal = SignificantNominal::literal_theta;
         } else {
           throw ConfigError(fmt::format(
               "key 'sig_nominal': '{}' is not path_loss_gain or literal_theta", e.value));
         }
       }},
      // rule and k are combined after all entries are read.
      {"distributed", "rule", kField, [](ExperimentSpec&, const ConfigEntry&) {}},
      {"distributed", "k", kField, [](ExperimentSpec&, const ConfigEntry&) {}},
  };
  return table;
}

}  // namespace

std::span<const ExperimentInfo> experiment_catalog() noexcept { return kCatalog; }

const ExperimentInfo& experiment_info(ExperimentId id) noexcept {
  return kCatalog[static_cast<std::size_t>(id) - 1];
}

ExperimentId parse_experiment_id(std::string_view text) {
  for (const auto& info : kCatalog) {
    const bool key_match = text.size() == info.key.size() &&
                           std::toupper(static_cast<unsigned char>(text[0])) == info.key[0] &&
                           text.substr(1) == info.key.substr(1);
    if (key_match || text == info.name) return info.id;
  }
  throw ConfigError(fmt::format("unknown experiment '{}' (expected E1..E7)", text));
}

std::string_view to_string(Metric m) noexcept { return kMetricNames[static_cast<std::size_t>(m)]; }

Metric parse_metric(std::string_view text) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == text) return static_cast<Metric>(i);
  }
  throw ConfigError(fmt::format("unknown metric '{}'", text));
}

std::vector<Metric> all_metrics() {
  return {Metric::fdr,      Metric::error_rate,       Metric::power,
          Metric::messages, Metric::messages_over_m1, Metric::v_geq_1_rate};
}

ExperimentSpec default_spec(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  switch (id) {
    case ExperimentId::E1:
      s.sweep = range(0.1, 0.1, 9);
      s.sensors = 150;
      s.null_mean = {0.0};
      s.sig_mean = {0.0};
      break;
    case ExperimentId::E2:
      s.sweep = range(20.0, 100.0, 10);
      s.sweep.push_back(std::numeric_limits<double>::infinity());
      s.gammas = {0.05, 0.1, 0.2};
      s.sensors = 1000;
      s.null_sensors = 700;
      s.null_mean = {0.0};
      s.sig_mean = {3.0};
      break;
    case ExperimentId::E3:
    case ExperimentId::E4:
      s.sweep = range(0.1, 0.1, 9);
      break;
    case ExperimentId::E5:
      s.sweep = range(0.03, 0.03, 5);
      s.field.theta = {2.0, 2.0, 2.0};
      break;
    case ExperimentId::E6:
      s.sweep = range(2.0, 0.2, 11);
      s.field.theta = {1.5, 1.5, 1.5};
      s.density = 0.1;
      s.nominal_null = NominalNull::distant_object;
      break;
    case ExperimentId::E7:
      s.sweep = {625.0, 1225.0, 2025.0, 3025.0};
      s.field.theta = {2.0, 2.0, 2.0};
      s.objects = 15;
      break;
  }
  return s;
}

void validate(const ExperimentSpec& spec) {
  const auto key = experiment_info(spec.id).key;
  auto fail = [&](std::string msg) { throw ConfigError(fmt::format("{}: {}", key, msg)); };

  if (spec.iterations < 1) fail("iterations must be at least 1");
  if (spec.iterations > std::numeric_limits<std::uint32_t>::max()) fail("too many iterations");
  if (spec.sweep.empty()) fail("sweep grid is empty");
  if (spec.gammas.empty()) fail("no gamma given");
  for (double g : spec.gammas) {
    if (!(g > 0.0 && g <= 1.0)) fail(fmt::format("gamma {} outside (0, 1]", g));
  }
  if (spec.metrics.empty()) fail("no metrics selected");
  if (spec.mc_samples < 1) fail("mc_samples must be at least 1");

  if (is_synthetic(spec.id)) {
    if (spec.sensors < 1) fail("sensors must be at least 1");
    const ObservationModel model = synthetic_model(spec);  // validates means and scales
    if (spec.transform == TransformKind::per_dimension && !model.factorizable()) {
      fail("per_dimension transform needs a factorizable model");
    }
  }
  switch (spec.id) {
    case ExperimentId::E1:
    case ExperimentId::E3:
    case ExperimentId::E4:
      for (double d : spec.sweep) {
        if (!(d >= 0.0 && d <= 1.0)) fail(fmt::format("density {} outside [0, 1]", d));
      }
      break;
    case ExperimentId::E2:
      if (spec.null_sensors > spec.sensors) fail("null_sensors exceeds sensors");
      for (double c : spec.sweep) {
        if (std::isinf(c) && c > 0) continue;
        if (!(c >= 1.0) || c != std::floor(c) || c > static_cast<double>(spec.sensors)) {
          fail(fmt::format("cap {} must be an integer in [1, {}] or inf", c, spec.sensors));
        }
      }
      break;
    case ExperimentId::E5:
      for (double d : spec.sweep) {
        if (!(d >= 0.0 && d <= 1.0)) fail(fmt::format("density {} outside [0, 1]", d));
      }
      break;
    case ExperimentId::E6:
      if (!(spec.density >= 0.0 && spec.density <= 1.0)) fail("density outside [0, 1]");
      break;
    case ExperimentId::E7:
      break;
  }
  if (is_field(spec.id)) {
    for (double v : spec.sweep) {
      const FieldConfig c = field_at(spec, v);
      c.validate();
      validate_rule(spec.rule, c.sensor_count());
    }
  }
}

ExperimentSpec spec_from_config(const ConfigDocument& doc) {
  std::vector<ConfigDiagnostic> diags;
  const ConfigEntry* id_entry = nullptr;
  for (const auto& e : doc.entries()) {
    if (e.section == "experiment" && e.key == "id") id_entry = &e;
  }
  if (id_entry == nullptr) {
    throw ConfigFileError(doc.source(), {{0, "missing required key 'id' in [experiment]"}});
  }
  ExperimentId id{};
  try {
    id = parse_experiment_id(id_entry->value);
  } catch (const ConfigError& err) {
    throw ConfigFileError(doc.source(), {{id_entry->line, err.what()}});
  }

  ExperimentSpec spec = default_spec(id);
  std::optional<std::string> rule_name;
  std::optional<std::size_t> k;
  std::size_t rule_line = 0;

  for (const auto& e : doc.entries()) {
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) {
      return d.section == e.section && d.key == e.key;
    });
    if (it == table.end()) {
      const bool known_section = std::any_of(table.begin(), table.end(),
                                             [&](const KeyDef& d) { return d.section == e.section; });
      diags.push_back({e.line, known_section
                                   ? fmt::format("unknown key '{}' in [{}]", e.key, e.section)
                                   : fmt::format("unknown section [{}]", e.section)});
      continue;
    }
    if ((it->experiments & bit(id)) == 0) {
      diags.push_back({e.line, fmt::format("key '{}' in [{}] does not apply to {}", e.key,
                                           e.section, experiment_info(id).key)});
      continue;
    }
    try {
      if (e.section == "distributed") {
        rule_line = e.line;
        if (e.key == "rule") rule_name = e.value;
        if (e.key == "k") k = as_size(e);
        continue;
      }
      it->set(spec, e);
    } catch (const ConfigError& err) {
      diags.push_back({e.line, err.what()});
    }
  }

  if (rule_name || k) {
    const std::string name = rule_name.value_or("preset_k");
    if (name == "preset_k") {
      spec.rule = PresetK{k.value_or(kDefaultPresetK)};
    } else if (name == "run_to_completion") {
      if (k) diags.push_back({rule_line, "key 'k' only applies to rule = preset_k"});
      spec.rule = RunToCompletion{};
    } else {
      diags.push_back({rule_line, fmt::format("unknown rule '{}' (preset_k, run_to_completion)", name)});
    }
  }

  if (!diags.empty()) throw ConfigFileError(doc.source(), std::move(diags));
  try {
    validate(spec);
  } catch (const ConfigError& err) {
    throw ConfigFileError(doc.source(), {{0, err.what()}});
  }
  return spec;
}

std::vector<std::string> procedure_names(const ExperimentSpec& spec) {
  switch (spec.id) {
    case ExperimentId::E1:
      return {"uncorrected", "bh", "oracle"};
    case ExperimentId::E2:
      return {"distributed_bh"};
    case ExperimentId::E3:
      return {"bh+chi", "bh+radial", "bh+per_dimension"};
    case ExperimentId::E4:
      return {"bh", "bonferroni", "uncorrected", "oracle"};
    default:
      return {"distributed_bh", "bonferroni", "uncorrected", "oracle"};
  }
}

std::span<const RunSample> SimulationResult::series(std::size_t point, std::size_t gamma,
                                                    std::size_t procedure) const {
  const std::size_t offset = ((point * gammas + gamma) * procedures.size() + procedure) * iterations;
  return std::span<const RunSample>(samples).subspan(offset, iterations);
}

std::size_t SimulationResult::procedure_index(std::string_view name) const {
  const auto it = std::find(procedures.begin(), procedures.end(), name);
  if (it == procedures.end()) throw ConfigError(fmt::format("no procedure '{}' in result", name));
  return static_cast<std::size_t>(it - procedures.begin());
}

SimulationResult simulate(const ExperimentSpec& spec, Execution exec) {
  validate(spec);
  SimulationResult out;
  out.procedures = procedure_names(spec);
  out.points = spec.sweep.size();
  out.gammas = spec.gammas.size();
  out.iterations = spec.iterations;
  out.samples.resize(out.points * out.gammas * out.procedures.size() * out.iterations);
  Simulator sim(spec, out);
  for_each_index(spec.iterations, [&](std::size_t it) { sim.iteration(it); }, exec);
  return out;
}

double metric_value(const RunSample& s, Metric metric) {
  const OutcomeTable& t = s.table;
  switch (metric) {
    case Metric::fdr:
      return t.false_discovery_proportion();
    case Metric::error_rate:
      return t.misclassification();
    case Metric::power:
      return t.power();
    case Metric::messages:
      return static_cast<double>(s.messages);
    case Metric::messages_over_m1:
      return t.m1 == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : static_cast<double>(s.messages) / static_cast<double>(t.m1);
    case Metric::v_geq_1_rate:
      return t.V >= 1 ? 1.0 : 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

MetricSummary summarize_values(std::span<const double> values) {
  MetricSummary out;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++out.n;
  }
  if (out.n == 0) {
    out.mean = out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) {
    out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - out.mean) * (v - out.mean);
  }
  const double n = static_cast<double>(out.n);
  out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

MetricSummary summarize(std::span<const RunSample> series, Metric metric) {
  std::vector<double> v(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) v[i] = metric_value(series[i], metric);
  return summarize_values(v);
}

std::vector<ResultRow> result_rows(const ExperimentSpec& spec, const SimulationResult& sim) {
  const auto& info = experiment_info(spec.id);
  std::vector<ResultRow> rows;
  for (std::size_t p = 0; p < sim.points; ++p) {
    const double shown = spec.sweep[p];
    for (std::size_t g = 0; g < sim.gammas; ++g) {
      for (std::size_t proc = 0; proc < sim.procedures.size(); ++proc) {
        const auto series = sim.series(p, g, proc);
        for (Metric metric : spec.metrics) {
          const MetricSummary s = summarize(series, metric);
          rows.push_back({std::string(info.key), std::string(info.sweep_variable), shown,
                          spec.gammas[g], sim.procedures[proc], metric, s.mean, s.std_error,
                          s.n});
        }
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, Execution exec) {
  return result_rows(spec, simulate(spec, exec));
}

void write_csv(std::ostream& out, const ExperimentSpec& spec, std::span<const ResultRow> rows) {
  const auto& info = experiment_info(spec.id);
  std::string meta = fmt::format("experiment={} name={} seed={} iterations={} gamma={} sweep={}",
                                 info.key, info.name, spec.seed, spec.iterations,
                                 format_list(spec.gammas), format_list(spec.sweep));
  if (spec.id != ExperimentId::E3) meta += fmt::format(" transform={}", to_string(spec.transform));
  if (is_synthetic(spec.id)) {
    meta += fmt::format(" sensors={}", spec.sensors);
    if (spec.id == ExperimentId::E1) {
      meta += fmt::format(" sigma0={:.12g} sigma1={:.12g}", spec.sigma0, spec.sigma1);
    } else {
      meta += fmt::format(" null_mean={} sig_mean={} sigma={:.12g}", format_list(spec.null_mean),
                          format_list(spec.sig_mean), spec.sigma);
    }
    if (spec.id == ExperimentId::E2) meta += fmt::format(" null_sensors={}", spec.null_sensors);
  } else {
    const FieldConfig& f = spec.field;
    meta += fmt::format(
        " n={} spacing={:.12g} d0={:.12g} d_min={:.12g} alpha={:.12g} theta={} noise_sigma={:.12g}"
        " sparse={} nominal_null={} sig_nominal={} rule={}",
        f.n, f.spacing, f.d0, f.d_min, f.alpha, format_list(f.theta), f.noise_sigma, f.sparse,
        nominal_text(spec.nominal_null), sig_nominal_text(f.sig_nominal), rule_text(spec.rule));
    if (spec.id == ExperimentId::E6) meta += fmt::format(" density={:.12g}", spec.density);
    if (spec.id == ExperimentId::E7) meta += fmt::format(" objects={}", spec.objects);
  }
  fmt::print(out, "# snetfdr-results v{} {}\n", kCsvSchemaVersion, meta);
  fmt::print(out, "experiment,sweep_variable,sweep_value,gamma,procedure,metric,mean,std_error,iterations\n");
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{:.12g},{:.12g},{},{},{:.12g},{:.12g},{}\n", r.experiment,
               r.sweep_variable, r.sweep_value, r.gamma, r.procedure, to_string(r.metric), r.mean,
               r.std_error, r.iterations);
  }
}

void emit_results(const ExperimentSpec& spec, std::span<const ResultRow> rows,
                  std::ostream& fallback) {
  if (spec.output.empty()) {
    write_csv(fallback, spec, rows);
    return;
  }
  std::ofstream file(spec.output, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError(fmt::format("cannot write output file '{}'", spec.output));
  write_csv(file, spec, rows);
  if (!file) throw ConfigError(fmt::format("error while writing '{}'", spec.output));
}

}  // namespace snetfdr
