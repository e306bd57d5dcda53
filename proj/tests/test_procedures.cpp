#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "generators.hpp"
#include "snetfdr/errors.hpp"
#include "snetfdr/procedures.hpp"

using namespace snetfdr;

namespace {

using Ids = std::vector<std::size_t>;

Labels labels_from(std::size_t m, const Ids& significant) {
  Labels l(m, Hypothesis::null);
  for (auto s : significant) l[s] = Hypothesis::significant;
  return l;
}

bool subset(const Ids& a, const Ids& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_SUITE("procedures") {
  TEST_CASE("three-statistic worked example") {
    const std::vector<double> y{0.01, 0.04, 0.2};
    const auto bh = bh_procedure(y, 0.15);
    CHECK(bh.indices == Ids{0, 1});
    CHECK(bh.threshold_index == 2);
    // Bonferroni level 0.15 / 3 = 0.05 admits 0.01 and 0.04.
    CHECK(bonferroni(y, 0.15).indices == Ids{0, 1});
    CHECK(bonferroni(y, 0.1).indices == Ids{0});
    CHECK(uncorrected(y, 0.15).indices == Ids{0, 1});
  }

  TEST_CASE("boundary gammas and extreme inputs") {
    const std::vector<double> y{0.01, 0.04, 0.2};
    CHECK(bonferroni(y, 0.0).empty());
    CHECK(uncorrected(y, 0.0).empty());
    CHECK(uncorrected(y, 1.0).size() == 3);

    const std::vector<double> zeros(7, 0.0);
    CHECK(bh_procedure(zeros, 0.1).size() == 7);
    CHECK(bh_procedure(zeros, 0.1).threshold_index == 7);
    CHECK(bonferroni(zeros, 0.1).size() == 7);

    const std::vector<double> large{0.5, 0.6, 0.9};
    const auto none = bh_procedure(large, 0.1);
    CHECK(none.empty());
    CHECK(none.threshold_index == 0);
  }

  TEST_CASE("ties at the crossing are rejected together") {
    // Sorted: 0.02, 0.05, 0.05, 0.05. Threshold 4 * 0.05 / 4 = 0.05 admits all.
    const std::vector<double> y{0.05, 0.02, 0.05, 0.05};
    CHECK(bh_procedure(y, 0.05).size() == 4);
    CHECK(rank_order(y) == Ids{1, 0, 2, 3});
  }

  TEST_CASE("invalid inputs") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(bh_procedure(empty, 0.1), ConfigError);
    const std::vector<double> bad{0.2, 1.5};
    CHECK_THROWS_AS(bh_procedure(bad, 0.1), ConfigError);
    const std::vector<double> ok{0.2};
    CHECK_THROWS_AS(uncorrected(ok, -0.1), ConfigError);
    ObservationMatrix x(1, 1);
    const auto model = ObservationModel::gaussian_mean_shift({0.0}, {1.0});
    CHECK_THROWS_AS(bayes_oracle(x, model, 0.0), ConfigError);
    CHECK_THROWS_AS(bayes_oracle(x, model, 1.0), ConfigError);
  }

  TEST_CASE("Bayes oracle thresholds the likelihood ratio") {
    const auto model = ObservationModel::gaussian_mean_shift({0.0}, {2.0});
    ObservationMatrix x(4, 1);
    x.row(0)[0] = -1.0;
    x.row(1)[0] = 0.9;   // phi < 1
    x.row(2)[0] = 1.1;   // phi > 1
    x.row(3)[0] = 5.0;
    CHECK(bayes_oracle(x, model, 0.5).indices == Ids{2, 3});
    // pi = 0.01: threshold 99, log 4.595; phi(x) = exp(2x - 2) > 99 iff x > 3.30.
    CHECK(bayes_oracle(x, model, 0.01).indices == Ids{3});
    CHECK(bayes_oracle(x, model, 1e-12).empty());

    const std::vector<ObservationModel> per_sensor(4, model);
    CHECK(bayes_oracle(x, per_sensor, 0.5).indices == Ids{2, 3});
  }

  TEST_CASE("outcome table counts") {
    const auto t = outcome_table(RejectionSet{{1, 2}, 0}, labels_from(4, {2, 3}));
    CHECK(t.V == 1);
    CHECK(t.Z == 1);
    CHECK(t.T == 1);
    CHECK(t.U == 1);
    CHECK(t.R == 2);
    CHECK(t.misclassification() == doctest::Approx(0.5));
    const std::vector<OutcomeTable> hand{t};
    CHECK(error_rate(hand) == doctest::Approx(0.5));
    CHECK(t.false_discovery_proportion() == doctest::Approx(0.5));

    const auto all_null = outcome_table(RejectionSet{}, labels_from(5, {}));
    CHECK(all_null.U == 5);
    CHECK(all_null.V + all_null.T + all_null.Z == 0);
    CHECK(all_null.false_discovery_proportion() == 0.0);
    CHECK(all_null.power() == 1.0);

    // Decisions are the complement of the truth.
    const auto wrong = outcome_table(RejectionSet{{0, 1}, 0}, labels_from(4, {2, 3}));
    CHECK(wrong.V == 2);
    CHECK(wrong.T == 2);
    CHECK(wrong.U + wrong.Z == 0);
    const std::vector<OutcomeTable> one{wrong};
    CHECK(error_rate(one) == 1.0);

    CHECK_THROWS_AS(outcome_table(RejectionSet{{9}, 0}, labels_from(4, {})), ConfigError);
  }

  TEST_CASE("empirical FDR averages V/R with 0/0 read as 0") {
    OutcomeTable a;
    a.V = 1;
    a.R = 2;
    OutcomeTable b;
    const std::vector<OutcomeTable> tables{a, b};
    CHECK(empirical_fdr(tables) == doctest::Approx(0.25));
    const std::vector<OutcomeTable> clean{b};
    CHECK(empirical_fdr(clean) == 0.0);
    CHECK_THROWS_AS(empirical_fdr(std::span<const OutcomeTable>{}), ConfigError);
    CHECK_THROWS_AS(error_rate(std::span<const OutcomeTable>{}), ConfigError);
  }

  TEST_CASE("outcome tables satisfy the bookkeeping identities") {
    for (std::uint32_t c = 0; c < 500; ++c) {
      Rng g = gen::case_rng(20, c);
      const std::size_t m = gen::size_in(g, 1, 200);
      const auto y = gen::statistics(g, m);
      Labels truth(m);
      for (auto& h : truth) h = uniform01(g) < 0.3 ? Hypothesis::significant : Hypothesis::null;
      const auto t = outcome_table(bh_procedure(y, gen::real_in(g, 0.01, 0.5)), truth);
      CAPTURE(c);
      REQUIRE(t.V + t.Z == t.R);
      REQUIRE(t.U + t.T == t.m - t.R);
      REQUIRE(t.U + t.V == t.m0);
      REQUIRE(t.T + t.Z == t.m1);
      REQUIRE(t.m0 + t.m1 == t.m);
    }
  }

  TEST_CASE("BH rejection set is invariant under permutation") {
    for (std::uint32_t c = 0; c < 300; ++c) {
      Rng g = gen::case_rng(21, c);
      const std::size_t m = gen::size_in(g, 1, 300);
      const auto y = gen::statistics(g, m, c % 3 == 0 ? 0.01 : 0.0);
      const double gamma = gen::real_in(g, 0.01, 0.5);
      std::vector<std::size_t> perm(m);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), g);
      std::vector<double> shuffled(m);
      for (std::size_t i = 0; i < m; ++i) shuffled[i] = y[perm[i]];

      const auto a = bh_procedure(y, gamma);
      auto b = bh_procedure(shuffled, gamma).indices;
      for (auto& s : b) s = perm[s];
      std::sort(b.begin(), b.end());
      CAPTURE(c);
      CHECK(a.indices == b);
    }
  }

  TEST_CASE("Bonferroni within BH within uncorrected, BH threshold bound") {
    for (std::uint32_t c = 0; c < 500; ++c) {
      Rng g = gen::case_rng(22, c);
      const std::size_t m = gen::size_in(g, 1, 500);
      const auto y = gen::statistics(g, m, c % 4 == 0 ? 0.002 : 0.0);
      const double gamma = gen::real_in(g, 0.001, 0.5);
      const auto bon = bonferroni(y, gamma);
      const auto bh = bh_procedure(y, gamma);
      const auto unc = uncorrected(y, gamma);
      CAPTURE(c);
      CHECK(subset(bon.indices, bh.indices));
      CHECK(subset(bh.indices, unc.indices));
      CHECK(bh.size() == bh.threshold_index);
      for (auto s : bh.indices) CHECK(y[s] <= bh_threshold(bh.threshold_index, gamma, m));
    }
  }

  TEST_CASE("BH controls FDR at m0/m gamma on uniform nulls") {
    // 2000 runs, m = 200, m0 = 140, strong signals. Limit 0.07 + 3 SE.
    constexpr std::size_t runs = 2000;
    constexpr std::size_t m = 200;
    constexpr std::size_t m1 = 60;
    std::vector<double> fdp(runs);
    std::normal_distribution<double> normal;
    for (std::size_t r = 0; r < runs; ++r) {
      Rng g(gen::kSeed, 23, static_cast<std::uint32_t>(r));
      std::vector<double> y(m);
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = i < m1 ? normal_sf(normal(g) + 3.0) : uniform01(g);
      }
      const auto t = outcome_table(bh_procedure(y, 0.1), labels_from(m, [&] {
                                     Ids ids(m1);
                                     std::iota(ids.begin(), ids.end(), std::size_t{0});
                                     return ids;
                                   }()));
      fdp[r] = t.false_discovery_proportion();
    }
    const double mean = std::accumulate(fdp.begin(), fdp.end(), 0.0) / runs;
    double ss = 0.0;
    for (double v : fdp) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (runs - 1)) / std::sqrt(static_cast<double>(runs));
    CHECK(mean <= 0.07 + 3.0 * se);
  }
}
