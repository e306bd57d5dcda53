#include "snetfdr/acceptance/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "snetfdr/acceptance/oracles.hpp"
#include "snetfdr/distributed.hpp"
#include "snetfdr/field.hpp"
#include "snetfdr/harness.hpp"
#include "snetfdr/kernels.hpp"
#include "snetfdr/measure.hpp"
#include "snetfdr/procedures.hpp"

namespace snetfdr::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> values_of(std::span<const RunSample> series, Metric metric) {
  std::vector<double> v(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) v[i] = metric_value(series[i], metric);
  return v;
}

// a <= b up to k paired standard errors of a - b.
Check at_most(std::string label, std::span<const double> a, std::span<const double> b,
              double k) {
  const auto d = oracle::paired_difference(a, b);
  const bool ok = d.mean <= k * d.std_error;
  return {std::move(label), ok,
          fmt::format("diff {:+.5f}, allowed {:.5f} ({} SE, SE {:.5f})", d.mean,
                      k * d.std_error, k, d.std_error)};
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

ObservationModel three_d_model() {
  return ObservationModel::gaussian_mean_shift({0.0, 0.0, 0.0}, {1.5, 1.5, 1.5}, 1.0);
}

// ---------------------------------------------------------------------------

Report null_uniformity(const Options& o) {
  Report r;
  const ObservationModel model = three_d_model();

  const auto t0 = Clock::now();
  constexpr std::size_t n = 100000;
  ObservationMatrix x(n, 3);
  Rng rng(o.seed, 1);
  for (std::size_t i = 0; i < n; ++i) model.sample_null(rng, x.row(i));
  std::vector<double> y(n);
  transform_batch(model, TransformKind::chi, x, y, o.seed, 2, o.execution);
  const double d = oracle::ks_statistic_uniform(y);
  const double p = oracle::ks_pvalue(d, n);
  const double secs = seconds_since(t0);
  r.checks.push_back({"KS of 1e5 null chi statistics vs U[0,1] at 0.01", p >= 0.01,
                      fmt::format("D = {:.5f}, p = {:.4f}", d, p)});
  r.checks.push_back({"runtime under 10 s", secs < 10.0, fmt::format("{:.2f} s", secs)});

  // Same criterion through the Monte Carlo fallback on a smaller sample.
  constexpr std::size_t n_mc = 2000;
  ObservationMatrix x2(n_mc, 3);
  Rng rng2(o.seed, 3);
  for (std::size_t i = 0; i < n_mc; ++i) model.sample_null(rng2, x2.row(i));
  std::vector<double> y2(n_mc);
  TransformOptions mc;
  mc.mc_samples = 4000;
  mc.execution = Execution::serial;
  transform_batch(model.as_generic(), TransformKind::chi, x2, y2, o.seed, 4, o.execution, mc);
  const double d2 = oracle::ks_statistic_uniform(y2);
  const double p2 = oracle::ks_pvalue(d2, n_mc);
  r.checks.push_back({"KS of Monte Carlo chi (2000 stats, 4000 null draws each)", p2 >= 0.01,
                      fmt::format("D = {:.5f}, p = {:.4f}", d2, p2)});
  return r;
}

Report fdr_control(const Options& o) {
  Report r;
  const auto t0 = Clock::now();
  ExperimentSpec spec = default_spec(ExperimentId::E2);
  spec.sweep = {std::numeric_limits<double>::infinity()};
  spec.gammas = {0.1};
  spec.iterations = o.iterations.value_or(5000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);
  const auto s = summarize(sim.series(0, 0, 0), Metric::fdr);
  const double level = 0.1 * 700.0 / 1000.0;
  r.checks.push_back({"FDR <= (m0/m) gamma + 3 SE, no cap", s.mean <= level + 3.0 * s.std_error,
                      fmt::format("FDR {:.5f} (SE {:.5f}), limit {:.5f}, {} runs", s.mean,
                                  s.std_error, level + 3.0 * s.std_error, s.n)});
  const double secs = seconds_since(t0);
  r.checks.push_back({"runtime under 2 min", secs < 120.0, fmt::format("{:.2f} s", secs)});
  return r;
}

Report comm_cap(const Options& o) {
  Report r;
  ExperimentSpec spec = default_spec(ExperimentId::E2);
  spec.sweep.pop_back();  // drop the uncapped point
  spec.iterations = o.iterations.value_or(5000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);
  for (std::size_t g = 0; g < spec.gammas.size(); ++g) {
    for (std::size_t p = 0; p + 1 < spec.sweep.size(); ++p) {
      const auto lo = values_of(sim.series(p, g, 0), Metric::fdr);
      const auto hi = values_of(sim.series(p + 1, g, 0), Metric::fdr);
      r.checks.push_back(at_most(fmt::format("gamma {:g}: FDR(C={:g}) <= FDR(C={:g})",
                                             spec.gammas[g], spec.sweep[p], spec.sweep[p + 1]),
                                 lo, hi, 2.0));
    }
  }
  return r;
}

Report transform_dominance(const Options& o) {
  Report r;
  const auto t0 = Clock::now();
  ExperimentSpec spec = default_spec(ExperimentId::E3);
  spec.iterations = o.iterations.value_or(5000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);

  // E4 with the same seed sees the same observations, so its oracle column
  // is the oracle for these exact data sets.
  ExperimentSpec e4 = default_spec(ExperimentId::E4);
  e4.iterations = spec.iterations;
  e4.seed = o.seed;
  e4.sweep.clear();
  for (double d : spec.sweep) {
    if (d <= 0.3 + 1e-12) e4.sweep.push_back(d);
  }
  const auto oracle_sim = simulate(e4, o.execution);

  const std::size_t chi = sim.procedure_index("bh+chi");
  for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
    const auto e_chi = values_of(sim.series(p, 0, chi), Metric::error_rate);
    for (const char* other : {"bh+radial", "bh+per_dimension"}) {
      const auto e_other =
          values_of(sim.series(p, 0, sim.procedure_index(other)), Metric::error_rate);
      r.checks.push_back(at_most(
          fmt::format("density {:g}: error(bh+chi) <= error({})", spec.sweep[p], other), e_chi,
          e_other, 2.0));
    }
  }
  const std::size_t orc = oracle_sim.procedure_index("oracle");
  for (std::size_t p = 0; p < e4.sweep.size(); ++p) {
    const double e_chi = mean_of(values_of(sim.series(p, 0, chi), Metric::error_rate));
    const double e_orc = mean_of(values_of(oracle_sim.series(p, 0, orc), Metric::error_rate));
    r.checks.push_back({fmt::format("density {:g}: error(bh+chi) - error(oracle) <= 0.02",
                                    e4.sweep[p]),
                        e_chi - e_orc <= 0.02,
                        fmt::format("bh+chi {:.5f}, oracle {:.5f}, gap {:.5f}", e_chi, e_orc,
                                    e_chi - e_orc)});
  }
  const double secs = seconds_since(t0);
  r.checks.push_back({"runtime under 5 min", secs < 300.0, fmt::format("{:.2f} s", secs)});
  return r;
}

Report procedure_ordering(const Options& o) {
  Report r;
  ExperimentSpec spec = default_spec(ExperimentId::E4);
  spec.iterations = o.iterations.value_or(5000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);
  auto err = [&](std::size_t p, const char* name) {
    return values_of(sim.series(p, 0, sim.procedure_index(name)), Metric::error_rate);
  };
  for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
    const double d = spec.sweep[p];
    const auto bh = err(p, "bh");
    r.checks.push_back(
        at_most(fmt::format("density {:g}: error(oracle) <= error(bh)", d), err(p, "oracle"), bh,
                2.0));
    r.checks.push_back(at_most(fmt::format("density {:g}: error(bh) <= error(bonferroni)", d), bh,
                               err(p, "bonferroni"), 2.0));
    r.checks.push_back(at_most(fmt::format("density {:g}: error(bh) <= error(uncorrected)", d),
                               bh, err(p, "uncorrected"), 2.0));
  }
  return r;
}

// Random statistic vector: uniform nulls, significant values pushed toward 0,
// and on some instances a coarse grid so that ties are common.
std::vector<double> random_instance(Rng& rng, std::size_t max_m, double& gamma) {
  const std::size_t m = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_m));
  const double frac = uniform01(rng);
  const double shift = 4.0 * uniform01(rng);
  const bool ties = uniform01(rng) < 0.25;
  gamma = 0.01 + 0.49 * uniform01(rng);
  std::normal_distribution<double> normal;
  std::vector<double> y(m);
  for (double& v : y) {
    v = uniform01(rng) < frac ? normal_sf(normal(rng) + shift) : uniform01(rng);
    if (ties) v = std::round(v * 50.0) / 50.0;
  }
  return y;
}

Report distributed_equivalence(const Options& o) {
  Report r;
  constexpr std::size_t instances = 10000;
  std::vector<unsigned char> mismatch(instances, 0);
  for_each_index(
      instances,
      [&](std::size_t i) {
        Rng rng(o.seed, static_cast<std::uint32_t>(i), 0xe9);
        double gamma = 0.1;
        const auto y = random_instance(rng, 1000, gamma);
        const auto central = bh_procedure(y, gamma);
        const auto dist = run_distributed_bh(y, gamma, RunToCompletion{}, {.record_rounds = false});
        mismatch[i] = central.indices != dist.rejected.indices;
      },
      o.execution);
  const auto bad = std::count(mismatch.begin(), mismatch.end(), 1);
  r.checks.push_back({"run_to_completion == bh_procedure on 1e4 instances, m <= 1000", bad == 0,
                      fmt::format("{} mismatches", bad)});

  // The event-driven simulator against the literal lockstep one, all rules.
  constexpr std::size_t small = 1000;
  std::vector<unsigned char> lock_bad(small, 0);
  for_each_index(
      small,
      [&](std::size_t i) {
        Rng rng(o.seed, static_cast<std::uint32_t>(i), 0xe10);
        double gamma = 0.1;
        const auto y = random_instance(rng, 200, gamma);
        const std::size_t m = y.size();
        const std::size_t k = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(m));
        const std::size_t cap = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(m));
        for (const StoppingRule rule :
             {StoppingRule{RunToCompletion{}}, StoppingRule{PresetK{k}}, StoppingRule{CommCap{cap}}}) {
          const auto a = run_distributed_bh(y, gamma, rule);
          const auto b = run_distributed_bh_lockstep(y, gamma, rule);
          if (a.rejected.indices != b.rejected.indices || a.messages != b.messages ||
              a.t_max != b.t_max) {
            lock_bad[i] = 1;
          }
        }
      },
      o.execution);
  const auto bad2 = std::count(lock_bad.begin(), lock_bad.end(), 1);
  r.checks.push_back({"event-driven == lockstep reference on 1e3 instances, all rules", bad2 == 0,
                      fmt::format("{} mismatches", bad2)});
  return r;
}

Report message_scaling(const Options& o) {
  Report r;
  ExperimentSpec spec = default_spec(ExperimentId::E7);
  spec.iterations = o.iterations.value_or(2000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);
  const std::size_t dist = sim.procedure_index("distributed_bh");
  const std::size_t unc = sim.procedure_index("uncorrected");

  std::vector<double> per_m1;
  for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
    per_m1.push_back(summarize(sim.series(p, 0, dist), Metric::messages_over_m1).mean);
  }
  const double center = mean_of(per_m1);
  double worst = 0.0;
  std::string listing;
  for (std::size_t p = 0; p < per_m1.size(); ++p) {
    worst = std::max(worst, std::abs(per_m1[p] - center) / center);
    listing += fmt::format("{}m={:g}: {:.4f}", p ? ", " : "", spec.sweep[p], per_m1[p]);
  }
  r.checks.push_back({"distributed BH messages/m1 within +-25% of its mean across m",
                      worst <= 0.25,
                      fmt::format("{}; band center {:.4f}, worst deviation {:.1f}%", listing,
                                  center, 100.0 * worst)});

  const double first = summarize(sim.series(0, 0, unc), Metric::messages).mean;
  const double last = summarize(sim.series(spec.sweep.size() - 1, 0, unc), Metric::messages).mean;
  r.checks.push_back({"uncorrected messages grow >= 3x from smallest to largest m",
                      last >= 3.0 * first,
                      fmt::format("{:.2f} -> {:.2f} ({:.2f}x)", first, last, last / first)});

  for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
    std::vector<double> ratio;
    for (const auto& s : sim.series(p, 0, dist)) {
      if (s.table.R > 0) {
        ratio.push_back(static_cast<double>(s.table.m1) / static_cast<double>(s.table.R));
      }
    }
    const auto sum = summarize_values(ratio);
    const double floor = 1.0 - spec.gammas[0] - 2.0 * sum.std_error;
    r.checks.push_back({fmt::format("m={:g}: mean(m1/R) >= 1 - gamma - 2 SE", spec.sweep[p]),
                        sum.n > 1 && sum.mean >= floor,
                        fmt::format("{:.4f} over {} runs with R > 0, floor {:.4f}", sum.mean,
                                    sum.n, floor)});
  }
  return r;
}

Report tail_bound_suite(const Options& o) {
  Report r;
  constexpr std::size_t m = 1000;
  constexpr std::size_t m1 = 400;
  constexpr double gamma = 0.1;
  constexpr double eps = 0.3;
  const std::size_t runs = o.iterations.value_or(10000);
  const boost::math::normal_distribution<double> std_normal;

  for (std::size_t k : {50u, 100u, 200u}) {
    const double l_k = bh_threshold(k, gamma, m);
    const auto j = static_cast<std::size_t>(std::ceil(static_cast<double>(k) / (1.0 - eps)));
    // Significant statistics are Q(X) with X ~ N(s, 1), so P{Y <= l} = Q(Q^-1(l) - s).
    // Pick s so that the expected count below l_k is j + 1; that puts the mean
    // of the j-th order statistic just under l_k.
    const double z = boost::math::quantile(boost::math::complement(std_normal, l_k));
    const double target = static_cast<double>(j + 1);
    auto expected_count = [&](double s) {
      return static_cast<double>(m - m1) * l_k +
             static_cast<double>(m1) * boost::math::cdf(boost::math::complement(std_normal, z - s));
    };
    double lo = -10.0;
    double hi = 20.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (expected_count(mid) < target ? lo : hi) = mid;
    }
    const double shift = 0.5 * (lo + hi);

    std::vector<unsigned char> exceed(runs, 0);
    std::vector<double> yj(runs, 0.0);
    for_each_index(
        runs,
        [&](std::size_t run) {
          Rng rng(o.seed, static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(k), 0x7b);
          std::normal_distribution<double> normal;
          std::vector<double> y(m);
          for (std::size_t i = 0; i < m; ++i) {
            y[i] = i < m1 ? oracle::normal_cdf(-(normal(rng) + shift)) : uniform01(rng);
          }
          std::sort(y.begin(), y.end());
          exceed[run] = y[k - 1] > l_k;
          yj[run] = y[j - 1];
        },
        o.execution);

    const auto hyp = summarize_values(yj);
    r.checks.push_back({fmt::format("k={}: model meets E(Y_({})) <= l_k", k, j),
                        hyp.mean <= l_k + 2.0 * hyp.std_error,
                        fmt::format("mean {:.6f} (SE {:.2g}), l_k {:.6f}, shift {:.4f}", hyp.mean,
                                    hyp.std_error, l_k, shift)});
    const double freq = static_cast<double>(std::count(exceed.begin(), exceed.end(), 1)) /
                        static_cast<double>(runs);
    const double bound = tail_bound(k, eps);
    r.checks.push_back({fmt::format("k={}: Pr(Y_(k) > l_k) <= exp(-eps^2 k / (2 (1 - eps)))", k),
                        freq <= bound,
                        fmt::format("empirical {:.3g} over {} runs, bound {:.3g}", freq, runs,
                                    bound)});
  }
  return r;
}

Report robustness(const Options& o) {
  Report r;
  constexpr double gamma = 0.1;
  const std::size_t runs = o.iterations.value_or(2000);
  constexpr std::size_t calibration = 300;
  const ExperimentSpec e6 = default_spec(ExperimentId::E6);

  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(i / 100.0);

  for (double alpha : e6.sweep) {
    FieldConfig config = e6.field;
    config.alpha = alpha;
    config.object_count = objects_for_density(config, e6.density);
    const ObservationModel nominal = nominal_model(config, e6.nominal_null);

    auto statistics = [&](std::uint32_t stream, std::size_t it, FieldRealization& f) {
      Rng rng(o.seed, static_cast<std::uint32_t>(it), stream);
      f = realize(config, rng);
      std::vector<double> y(f.labels.size());
      transform_batch(nominal, TransformKind::chi, f.observations, y, o.seed ^ stream,
                      static_cast<std::uint32_t>(it), Execution::serial);
      return y;
    };

    // Calibration: pool null-sensor statistics from independent fields.
    std::vector<std::vector<double>> pooled(calibration);
    for_each_index(
        calibration,
        [&](std::size_t it) {
          FieldRealization f;
          const auto y = statistics(0xca1, it, f);
          for (std::size_t s = 0; s < y.size(); ++s) {
            if (f.labels[s] == Hypothesis::null) pooled[it].push_back(y[s]);
          }
        },
        o.execution);
    std::vector<double> nulls;
    for (const auto& v : pooled) nulls.insert(nulls.end(), v.begin(), v.end());
    const double eps = oracle::relative_cdf_deviation(nulls, grid, 100.0);
    const double gamma_prime = robust_threshold(gamma, eps);

    std::vector<double> fdp_plain(runs);
    std::vector<double> fdp_robust(runs);
    for_each_index(
        runs,
        [&](std::size_t it) {
          FieldRealization f;
          const auto y = statistics(0xf1e, it, f);
          fdp_plain[it] = outcome_table(bh_procedure(y, gamma), f.labels).false_discovery_proportion();
          fdp_robust[it] =
              outcome_table(bh_procedure(y, gamma_prime), f.labels).false_discovery_proportion();
        },
        o.execution);
    const auto plain = summarize_values(fdp_plain);
    const auto robust = summarize_values(fdp_robust);
    r.checks.push_back(
        {fmt::format("alpha {:g}: FDR(BH at gamma) <= gamma (1 + eps) + 2 SE", alpha),
         plain.mean <= gamma * (1.0 + eps) + 2.0 * plain.std_error,
         fmt::format("eps {:.4f}, FDR {:.5f}, limit {:.5f}", eps, plain.mean,
                     gamma * (1.0 + eps) + 2.0 * plain.std_error)});
    r.checks.push_back(
        {fmt::format("alpha {:g}: FDR(BH at gamma/(1 + eps)) <= gamma + 2 SE", alpha),
         robust.mean <= gamma + 2.0 * robust.std_error,
         fmt::format("gamma' {:.5f}, FDR {:.5f}, limit {:.5f}", gamma_prime, robust.mean,
                     gamma + 2.0 * robust.std_error)});
  }
  return r;
}

Report attenuation_trend(const Options& o) {
  Report r;
  ExperimentSpec spec = default_spec(ExperimentId::E6);
  spec.iterations = o.iterations.value_or(2000);
  spec.seed = o.seed;
  const auto sim = simulate(spec, o.execution);
  const std::size_t dist = sim.procedure_index("distributed_bh");
  for (std::size_t p = 0; p + 1 < spec.sweep.size(); ++p) {
    const auto e_lo = values_of(sim.series(p, 0, dist), Metric::error_rate);
    const auto e_hi = values_of(sim.series(p + 1, 0, dist), Metric::error_rate);
    r.checks.push_back(at_most(fmt::format("error(alpha={:g}) <= error(alpha={:g})",
                                           spec.sweep[p + 1], spec.sweep[p]),
                               e_hi, e_lo, 2.0));
  }
  for (std::size_t p = 0; p + 1 < spec.sweep.size(); ++p) {
    const auto m_lo = values_of(sim.series(p, 0, dist), Metric::messages);
    const auto m_hi = values_of(sim.series(p + 1, 0, dist), Metric::messages);
    r.checks.push_back(at_most(fmt::format("messages(alpha={:g}) <= messages(alpha={:g})",
                                           spec.sweep[p], spec.sweep[p + 1]),
                               m_lo, m_hi, 2.0));
  }
  return r;
}

Report fano(const Options&) {
  Report r;
  for (std::size_t m : {10u, 100u, 1000u}) {
    const auto same = ObservationModel::gaussian_mean_shift({0.0}, {0.0}, 1.0);
    const double v = fano_lower_bound(same, m);
    const double want = 1.0 - 1.0 / static_cast<double>(m);
    r.checks.push_back({fmt::format("identical densities, m={}: bound = 1 - 1/m", m),
                        std::abs(v - want) <= 1e-9, fmt::format("{:.12f} vs {:.12f}", v, want)});
  }

  constexpr std::size_t m = 100;
  for (double sep : {0.5, 1.5, 3.0}) {
    const auto model = ObservationModel::gaussian_mean_shift({0.0}, {sep}, 1.0);
    const double v = fano_lower_bound(model, m);
    const double ref =
        oracle::conditional_entropy_bits([](double x) { return oracle::normal_pdf(x, 0.0, 1.0); },
                                         [sep](double x) { return oracle::normal_pdf(x, sep, 1.0); },
                                         -12.0, 12.0 + sep) -
        1.0 / static_cast<double>(m);
    r.checks.push_back({fmt::format("separation {:g}: matches Simpson quadrature", sep),
                        std::abs(v - ref) <= 1e-4,
                        fmt::format("{:.8f} vs {:.8f}", v, ref)});
  }

  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  std::string where;
  for (int i = 0; i <= 24; ++i) {
    const double sep = 0.25 * i;
    const double v =
        fano_lower_bound(ObservationModel::gaussian_mean_shift({0.0}, {sep}, 1.0), m);
    if (!(v < prev)) {
      monotone = false;
      where = fmt::format("not decreasing at separation {:g}", sep);
    }
    prev = v;
  }
  r.checks.push_back({"bound decreases with separation on 0..6", monotone,
                      monotone ? "25 points" : where});
  return r;
}

constexpr std::array<Suite, 11> kSuites{{
    {1, "null-uniformity", "null chi statistics are U[0,1]", null_uniformity},
    {2, "fdr-control", "distributed BH keeps FDR at (m0/m) gamma", fdr_control},
    {3, "comm-cap", "FDR is nondecreasing in the message cap", comm_cap},
    {4, "transform-dominance", "chi beats radial and per-dimension, tracks the oracle",
     transform_dominance},
    {5, "procedure-ordering", "oracle <= BH <= min(Bonferroni, uncorrected)", procedure_ordering},
    {6, "distributed-equivalence", "distributed run equals centralized BH",
     distributed_equivalence},
    {7, "message-scaling", "messages scale with m1, not m", message_scaling},
    {8, "tail-bound", "early-quit tail probability bound", tail_bound_suite},
    {9, "robustness", "FDR under a perturbed null", robustness},
    {10, "attenuation-trend", "error falls and messages rise with alpha", attenuation_trend},
    {11, "fano-bound", "Fano lower bound sanity", fano},
}};

}  // namespace

bool Report::passed() const noexcept { return !checks.empty() && failures() == 0; }

std::size_t Report::failures() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

std::span<const Suite> suites() noexcept { return kSuites; }

const Suite* find_suite(std::string_view name) noexcept {
  for (const auto& s : kSuites) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Report run(const Suite& suite, const Options& opts) {
  const auto t0 = Clock::now();
  Report r = suite.run(opts);
  r.criterion = suite.criterion;
  r.suite = std::string(suite.name);
  r.seconds = seconds_since(t0);
  return r;
}

void print(std::ostream& out, const Report& report, bool verbose) {
  fmt::print(out, "{} {:>2} {:<24} {}/{} checks  {:.1f} s\n", report.passed() ? "PASS" : "FAIL",
             report.criterion, report.suite, report.checks.size() - report.failures(),
             report.checks.size(), report.seconds);
  for (const auto& c : report.checks) {
    if (verbose || !c.passed) {
      fmt::print(out, "       {} {}: {}\n", c.passed ? "ok  " : "FAIL", c.label, c.detail);
    }
  }
}

}  // namespace snetfdr::acceptance
