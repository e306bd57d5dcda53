#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "snetfdr/config.hpp"
#include "snetfdr/errors.hpp"
#include "snetfdr/harness.hpp"

using namespace snetfdr;

namespace {

std::vector<ConfigDiagnostic> diagnostics_of(std::string_view text) {
  try {
    spec_from_config(ConfigDocument::parse(text, "t.cfg"));
  } catch (const ConfigFileError& e) {
    return e.diagnostics();
  }
  return {};
}

std::string csv_of(const ExperimentSpec& spec, Execution exec) {
  std::ostringstream out;
  write_csv(out, spec, run_experiment(spec, exec));
  return out.str();
}

ExperimentSpec small(ExperimentId id, std::size_t iterations) {
  auto s = default_spec(id);
  s.iterations = iterations;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("sections, comments and line numbers") {
    const auto doc = ConfigDocument::parse(
        "# header comment\n"
        "[experiment]\n"
        "id = E3   # trailing comment\n"
        "\n"
        "; another comment\n"
        "[sweep]\n"
        "values = 0.1:0.3:0.1\n");
    REQUIRE(doc.entries().size() == 2);
    CHECK(doc.entries()[0].section == "experiment");
    CHECK(doc.entries()[0].value == "E3");
    CHECK(doc.entries()[0].line == 3);
    CHECK(doc.entries()[1].line == 7);
    CHECK(parse_double_list(doc.entries()[1]) == std::vector<double>{0.1, 0.2, 0.3});
  }

  TEST_CASE("syntax errors are all collected with their lines") {
    try {
      ConfigDocument::parse("orphan = 1\n[experiment\nid = E1\nid = E2\nnovalue =\njunk\n", "bad.cfg");
      FAIL("expected ConfigFileError");
    } catch (const ConfigFileError& e) {
      std::vector<std::size_t> lines;
      for (const auto& d : e.diagnostics()) lines.push_back(d.line);
      // The broken header leaves lines 3-5 outside any section.
      CHECK(lines == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
      CHECK(std::string(e.what()).find("bad.cfg:1:") != std::string::npos);
    }
  }

  TEST_CASE("duplicate keys are rejected") {
    try {
      ConfigDocument::parse("[experiment]\nid = E1\nid = E2\n");
      FAIL("expected ConfigFileError");
    } catch (const ConfigFileError& e) {
      REQUIRE(e.diagnostics().size() == 1);
      CHECK(e.diagnostics()[0].line == 3);
    }
  }

  TEST_CASE("value parsers") {
    auto entry = [](std::string v) { return ConfigEntry{"s", "k", std::move(v), 1}; };
    CHECK(parse_double(entry("2.5")) == 2.5);
    CHECK(std::isinf(parse_double(entry("inf"))));
    CHECK_THROWS_AS(parse_double(entry("nan")), ConfigError);
    CHECK_THROWS_AS(parse_double(entry("2.5x")), ConfigError);
    CHECK(parse_unsigned(entry("42")) == 42);
    CHECK_THROWS_AS(parse_unsigned(entry("-1")), ConfigError);
    CHECK(parse_bool(entry("yes")));
    CHECK_FALSE(parse_bool(entry("off")));
    CHECK_THROWS_AS(parse_bool(entry("maybe")), ConfigError);
    CHECK(parse_double_list(entry("2:4:0.2")).size() == 11);
    CHECK(parse_double_list(entry("2:4:0.2")).back() == 4.0);
    CHECK(parse_double_list(entry("1, 2,3")) == std::vector<double>{1, 2, 3});
    CHECK(parse_word_list(entry("fdr, power")) == std::vector<std::string>{"fdr", "power"});
  }

  TEST_CASE("unknown and misplaced keys name their lines") {
    const auto d = diagnostics_of(
        "[experiment]\n"
        "id = E3\n"
        "iteratons = 10\n"
        "[transform]\n"
        "kind = radial\n"
        "[field]\n"
        "alpha = 2\n"
        "[colours]\n"
        "x = 1\n");
    REQUIRE(d.size() == 4);
    CHECK(d[0].line == 3);
    CHECK(d[0].message.find("unknown key 'iteratons'") != std::string::npos);
    CHECK(d[1].line == 5);
    CHECK(d[1].message.find("does not apply to E3") != std::string::npos);
    CHECK(d[2].line == 7);
    CHECK(d[3].line == 9);
    CHECK(d[3].message.find("unknown section") != std::string::npos);
  }

  TEST_CASE("bad values and semantic range errors") {
    auto d = diagnostics_of("[experiment]\nid = E2\ngamma = 0.1, abc\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 3);

    d = diagnostics_of("[experiment]\nid = E7\n[sweep]\nvalues = 625, 1000\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("perfect square") != std::string::npos);

    d = diagnostics_of("[experiment]\nid = E2\n[sweep]\nvalues = 20, 2000\n");
    REQUIRE(d.size() == 1);

    d = diagnostics_of("[experiment]\nid = E9\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 2);

    d = diagnostics_of("[sweep]\nvalues = 1\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("missing required key 'id'") != std::string::npos);

    d = diagnostics_of("[experiment]\nid = E5\n[distributed]\nrule = run_to_completion\nk = 3\n");
    REQUIRE(d.size() == 1);
  }

  TEST_CASE("a valid config overrides defaults") {
    const auto spec = spec_from_config(ConfigDocument::parse(
        "[experiment]\nid = snet-density\nseed = 9\niterations = 17\ngamma = 0.05\n"
        "[field]\nalpha = inf\n[distributed]\nrule = preset_k\nk = 7\n"));
    CHECK(spec.id == ExperimentId::E5);
    CHECK(spec.seed == 9);
    CHECK(spec.iterations == 17);
    CHECK(spec.gammas == std::vector<double>{0.05});
    CHECK(std::isinf(spec.field.alpha));
    REQUIRE(std::holds_alternative<PresetK>(spec.rule));
    CHECK(std::get<PresetK>(spec.rule).k == 7);
  }
}

TEST_SUITE("harness") {
  TEST_CASE("catalog lists E1 to E7") {
    const auto cat = experiment_catalog();
    REQUIRE(cat.size() == 7);
    for (std::size_t i = 0; i < cat.size(); ++i) {
      CHECK(cat[i].key == "E" + std::to_string(i + 1));
      CHECK_FALSE(cat[i].description.empty());
    }
    CHECK(parse_experiment_id("e4") == ExperimentId::E4);
    CHECK(parse_experiment_id("attenuation") == ExperimentId::E6);
    CHECK_THROWS_AS(parse_experiment_id("E0"), ConfigError);
  }

  TEST_CASE("E3 at one density emits three transforms times the metrics") {
    auto s = small(ExperimentId::E3, 5);
    s.sweep = {0.1};
    s.metrics = {Metric::error_rate, Metric::power};
    const auto rows = run_experiment(s);
    CHECK(rows.size() == 3 * 2);
    std::set<std::string> procs;
    for (const auto& r : rows) procs.insert(r.procedure);
    CHECK(procs == std::set<std::string>{"bh+chi", "bh+radial", "bh+per_dimension"});
  }

  TEST_CASE("E7 sweeps the four network sizes") {
    auto s = small(ExperimentId::E7, 2);
    s.metrics = {Metric::messages};
    std::set<double> sizes;
    for (const auto& r : run_experiment(s)) sizes.insert(r.sweep_value);
    CHECK(sizes == std::set<double>{625, 1225, 2025, 3025});
  }

  TEST_CASE("CSV is byte-identical across runs and across execution modes") {
    for (auto id : {ExperimentId::E1, ExperimentId::E2, ExperimentId::E4, ExperimentId::E5}) {
      auto s = small(id, 8);
      s.sweep.resize(2);
      const auto a = csv_of(s, Execution::parallel);
      CHECK(a == csv_of(s, Execution::parallel));
      CHECK(a == csv_of(s, Execution::serial));
    }
  }

  TEST_CASE("different seeds give different results") {
    auto s = small(ExperimentId::E4, 6);
    s.sweep = {0.3};
    const auto a = csv_of(s, Execution::parallel);
    s.seed = 12;
    CHECK(a != csv_of(s, Execution::parallel));
  }

  TEST_CASE("CSV header carries the schema version") {
    auto s = small(ExperimentId::E1, 3);
    s.sweep = {0.5};
    std::istringstream in(csv_of(s, Execution::parallel));
    std::string header;
    std::string columns;
    std::getline(in, header);
    std::getline(in, columns);
    CHECK(header.rfind("# snetfdr-results v1 ", 0) == 0);
    CHECK(header.find("gamma=0.1") != std::string::npos);
    CHECK(columns == "experiment,sweep_variable,sweep_value,gamma,procedure,metric,mean,std_error,iterations");
    CHECK(kCsvSchemaVersion == 1);
  }

  TEST_CASE("standard errors shrink like one over root n") {
    auto s = small(ExperimentId::E4, 400);
    s.sweep = {0.3};
    const auto few = simulate(s);
    s.iterations = 1600;
    const auto many = simulate(s);
    const auto p = few.procedure_index("bh");
    const double se_few = summarize(few.series(0, 0, p), Metric::error_rate).std_error;
    const double se_many = summarize(many.series(0, 0, p), Metric::error_rate).std_error;
    // Quadrupling n halves the SE; allow 25 % sampling slack on the ratio.
    CHECK(se_few / se_many == doctest::Approx(2.0).epsilon(0.25));
  }

  TEST_CASE("summaries") {
    const std::vector<double> v{1.0, 2.0, 3.0, std::nan("")};
    const auto s = summarize_values(v);
    CHECK(s.n == 3);
    CHECK(s.mean == 2.0);
    CHECK(s.std_error == doctest::Approx(1.0 / std::sqrt(3.0)));
    const std::vector<double> one{4.0};
    CHECK(std::isnan(summarize_values(one).std_error));

    RunSample none;
    none.table.m = 10;
    none.table.m0 = 10;
    CHECK(std::isnan(metric_value(none, Metric::messages_over_m1)));
  }

  TEST_CASE("uncorrected false alarms scale with the null count") {
    auto s = small(ExperimentId::E4, 300);
    s.sweep = {0.3};
    const auto sim = simulate(s);
    const auto series = sim.series(0, 0, sim.procedure_index("uncorrected"));
    double v = 0.0;
    for (const auto& r : series) v += static_cast<double>(r.table.V);
    v /= static_cast<double>(series.size());
    // E V = gamma * m0 = 70; SD per run ~ 8, SE ~ 0.46.
    CHECK(v == doctest::Approx(70.0).epsilon(0.03));
  }

  TEST_CASE("spec validation") {
    auto s = default_spec(ExperimentId::E3);
    s.iterations = 0;
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = default_spec(ExperimentId::E3);
    s.sweep.clear();
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = default_spec(ExperimentId::E2);
    s.sweep = {20.5};
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = default_spec(ExperimentId::E5);
    s.rule = PresetK{0};
    CHECK_THROWS_AS(validate(s), ConfigError);
    for (const auto& e : experiment_catalog()) CHECK_NOTHROW(validate(default_spec(e.id)));
  }
}
