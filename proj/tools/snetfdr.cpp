// Command-line front end: run experiments from config files, list them, run
// the acceptance suites, print transform values and dump field realizations.
//
// Exit codes: 0 success, 1 failed acceptance suite or runtime error,
// 2 malformed config or bad arguments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "snetfdr/acceptance/acceptance.hpp"
#include "snetfdr/config.hpp"
#include "snetfdr/errors.hpp"
#include "snetfdr/field.hpp"
#include "snetfdr/harness.hpp"
#include "snetfdr/measure.hpp"

namespace {

using namespace snetfdr;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_point(const std::string& text) {
  ConfigEntry e{"cli", "point", text, 0};
  return parse_double_list(e);
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> iterations, const std::string& out, bool serial) {
  ExperimentSpec spec = spec_from_config(ConfigDocument::load(path));
  if (seed) spec.seed = *seed;
  if (iterations) spec.iterations = *iterations;
  if (!out.empty()) spec.output = out;
  validate(spec);
  const auto rows = run_experiment(spec, serial ? Execution::serial : Execution::parallel);
  emit_results(spec, rows, std::cout);
  if (!spec.output.empty()) {
    fmt::print(std::cerr, "wrote {} rows to {}\n", rows.size(), spec.output);
  }
  return 0;
}

int cmd_list() {
  for (const auto& e : experiment_catalog()) {
    fmt::print("{}  {:<15} sweep={:<8} {}\n", e.key, e.name, e.sweep_variable, e.description);
  }
  return 0;
}

int cmd_acceptance(const std::string& suite_name, std::optional<std::uint64_t> seed,
                   std::optional<std::size_t> iterations, bool verbose, bool serial) {
  acceptance::Options opts;
  if (seed) opts.seed = *seed;
  opts.iterations = iterations;
  opts.execution = serial ? Execution::serial : Execution::parallel;

  std::vector<const acceptance::Suite*> selected;
  if (suite_name.empty()) {
    for (const auto& s : acceptance::suites()) selected.push_back(&s);
  } else {
    const auto* s = acceptance::find_suite(suite_name);
    if (s == nullptr) {
      fmt::print(std::cerr, "unknown suite '{}'; available:", suite_name);
      for (const auto& x : acceptance::suites()) fmt::print(std::cerr, " {}", x.name);
      fmt::print(std::cerr, "\n");
      return kExitUsage;
    }
    selected.push_back(s);
  }

  std::vector<std::string> failed;
  for (const auto* s : selected) {
    const auto report = acceptance::run(*s, opts);
    acceptance::print(std::cout, report, verbose);
    std::cout.flush();
    if (!report.passed()) failed.push_back(fmt::format("{} {}", s->criterion, s->name));
  }
  if (!failed.empty()) {
    fmt::print(std::cerr, "violated criteria:");
    for (const auto& f : failed) fmt::print(std::cerr, " [{}]", f);
    fmt::print(std::cerr, "\n");
    return kExitFailure;
  }
  return 0;
}

struct DemoArgs {
  std::string model = "mean_shift";
  std::string null_mean = "0,0,0";
  std::string sig_mean = "1.5,1.5,1.5";
  double sigma = 1.0;
  double sigma0 = 1.0;
  double sigma1 = 2.0;
  std::string kind = "all";
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 1;
  std::vector<std::string> points;
};

int cmd_transform_demo(const DemoArgs& a) {
  ObservationModel model = a.model == "scale"
                               ? ObservationModel::gaussian_scale_1d(a.sigma0, a.sigma1)
                               : ObservationModel::gaussian_mean_shift(
                                     parse_point(a.null_mean), parse_point(a.sig_mean), a.sigma);
  std::vector<TransformKind> kinds;
  for (auto k : {TransformKind::chi, TransformKind::radial, TransformKind::per_dimension}) {
    if (a.kind == "all" || a.kind == to_string(k)) kinds.push_back(k);
  }
  if (kinds.empty()) throw ConfigError(fmt::format("unknown transform '{}'", a.kind));

  std::vector<std::string> points = a.points;
  if (points.empty()) {
    const std::size_t d = model.dim();
    for (double v : {0.0, 0.75, 1.5, 3.0}) {
      std::string p;
      for (std::size_t j = 0; j < d; ++j) p += fmt::format("{}{:g}", j ? "," : "", v);
      points.push_back(p);
    }
  }

  TransformOptions opts;
  opts.mc_samples = a.mc_samples;
  fmt::print("{:<24} {:>14}", "x", "log phi(x)");
  for (auto k : kinds) fmt::print(" {:>14}", to_string(k));
  fmt::print("\n");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto x = parse_point(points[i]);
    fmt::print("{:<24} {:>14.6g}", points[i], log_likelihood_ratio(model, x));
    for (auto k : kinds) {
      Rng rng(a.seed, static_cast<std::uint32_t>(i));
      fmt::print(" {:>14.8g}", apply_transform(k, model, x, rng, opts));
    }
    fmt::print("\n");
  }
  return 0;
}

struct DumpArgs {
  std::size_t n = 5;
  std::size_t objects = 1;
  double alpha = 2.0;
  std::uint64_t seed = 1;
  bool dense = false;
};

int cmd_field_dump(const DumpArgs& a) {
  FieldConfig c;
  c.n = a.n;
  c.object_count = a.objects;
  c.alpha = a.alpha;
  c.sparse = !a.dense;
  c.validate();
  Rng rng(a.seed);
  const auto f = realize(c, rng);
  dump_realization(std::cout, c, f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snetfdr: FDR-based detection in sensor networks"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::string out;
  std::string format = "csv";
  bool serial = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  std::string config_path;
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--iterations", iterations, "override the iteration count");
  run->add_option("--out", out, "output path (default: config value or stdout)");
  run->add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
  run->add_flag("--serial", serial, "run the serial reference path");

  auto* list = app.add_subcommand("list-experiments", "list E1..E7");

  auto* acc = app.add_subcommand("acceptance", "run acceptance suites");
  std::string suite;
  bool verbose = false;
  acc->add_option("--suite", suite, "run only this suite");
  acc->add_option("--seed", seed, "seed for all suites");
  acc->add_option("--iterations", iterations, "override Monte Carlo iteration counts");
  acc->add_flag("-v,--verbose", verbose, "print every check");
  acc->add_flag("--serial", serial, "run the serial reference path");

  auto* demo = app.add_subcommand("transform-demo", "print transform values for given points");
  DemoArgs demo_args;
  demo->add_option("--model", demo_args.model, "mean_shift or scale")
      ->check(CLI::IsMember({"mean_shift", "scale"}));
  demo->add_option("--null-mean", demo_args.null_mean, "comma-separated null mean");
  demo->add_option("--sig-mean", demo_args.sig_mean, "comma-separated significant mean");
  demo->add_option("--sigma", demo_args.sigma, "mean-shift noise scale");
  demo->add_option("--sigma0", demo_args.sigma0, "scale model null sd");
  demo->add_option("--sigma1", demo_args.sigma1, "scale model significant sd");
  demo->add_option("--kind", demo_args.kind, "chi, radial, per_dimension or all");
  demo->add_option("--mc-samples", demo_args.mc_samples, "Monte Carlo budget");
  demo->add_option("--seed", demo_args.seed, "dither seed");
  demo->add_option("points", demo_args.points, "points such as 1,1,1");

  auto* dump = app.add_subcommand("field-dump", "print one field realization");
  DumpArgs dump_args;
  dump->add_option("--n", dump_args.n, "grid side");
  dump->add_option("--objects", dump_args.objects, "object count");
  dump->add_option("--alpha", dump_args.alpha, "attenuation exponent (inf for ideal)");
  dump->add_option("--seed", dump_args.seed, "placement and noise seed");
  dump->add_flag("--dense", dump_args.dense, "allow two objects near one sensor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, seed, iterations, out, serial);
    if (*list) return cmd_list();
    if (*acc) return cmd_acceptance(suite, seed, iterations, verbose, serial);
    if (*demo) return cmd_transform_demo(demo_args);
    if (*dump) return cmd_field_dump(dump_args);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
