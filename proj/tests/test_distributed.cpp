#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "snetfdr/distributed.hpp"
#include "snetfdr/errors.hpp"
#include "snetfdr/procedures.hpp"

using namespace snetfdr;

namespace {

using Ids = std::vector<std::size_t>;

StoppingRule random_rule(Rng& g, std::size_t m) {
  switch (gen::size_in(g, 0, 2)) {
    case 0: return RunToCompletion{};
    case 1: return PresetK{gen::size_in(g, 1, m)};
    default: return CommCap{gen::size_in(g, 1, m)};
  }
}

std::size_t count_at_or_below(const std::vector<double>& y, double level) {
  return static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [&](double v) { return v <= level; }));
}

}  // namespace

TEST_SUITE("distributed") {
  TEST_CASE("three-statistic worked example matches BH") {
    const std::vector<double> y{0.01, 0.04, 0.2};
    const auto r = run_distributed_bh(y, 0.15, RunToCompletion{});
    CHECK(r.messages == 2);
    CHECK(r.rejected.indices == bh_procedure(y, 0.15).indices);
    CHECK(r.t_max == 2);
  }

  TEST_CASE("no statistic below gamma sends nothing") {
    const std::vector<double> y{0.3, 0.5, 0.9, 0.31};
    const auto r = run_distributed_bh(y, 0.2, RunToCompletion{});
    CHECK(r.messages == 0);
    CHECK(r.rejected.empty());
    CHECK(r.t_max == 0);
  }

  TEST_CASE("all-zero statistics announce everything in round one") {
    const std::vector<double> y(6, 0.0);
    const auto r = run_distributed_bh(y, 0.1, RunToCompletion{});
    CHECK(r.messages == 6);
    CHECK(r.rejected.size() == 6);
    REQUIRE_FALSE(r.rounds.empty());
    CHECK(r.rounds.front().announced == 6);
    // count_t >= i_t in every round, so t_max is the final round.
    CHECK(r.t_max == 6);
  }

  TEST_CASE("preset k quits after the first silent round past k") {
    const std::vector<double> y{0.001, 0.9, 0.95, 0.99, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3};
    const auto r = run_distributed_bh(y, 0.1, PresetK{3});
    CHECK(r.rounds.size() == 3);
    CHECK(r.messages == 1);
    CHECK(r.rejected.indices == Ids{0});
  }

  TEST_CASE("communication cap admits the smallest statistics first") {
    const std::vector<double> y{0.004, 0.001, 0.003, 0.002, 0.9};
    const auto r = run_distributed_bh(y, 0.1, CommCap{2});
    CHECK(r.messages == 2);
    CHECK(r.rejected.indices == Ids{1, 3});
  }

  TEST_CASE("robust threshold and tail bound") {
    CHECK(robust_threshold(0.1, 0.0) == 0.1);
    CHECK(robust_threshold(0.1, 0.1) == doctest::Approx(0.1 / 1.1));
    CHECK(robust_threshold(0.1, 1e12) < 1e-12);
    CHECK_THROWS_AS(robust_threshold(0.1, -0.01), ConfigError);

    CHECK(tail_bound(0, 0.3) == 1.0);
    CHECK(tail_bound(100, 1e-9) == doctest::Approx(1.0));
    CHECK(tail_bound(200, 0.3) == doctest::Approx(2.6074368808253605e-06).epsilon(1e-13));
    CHECK_THROWS_AS(tail_bound(10, 0.0), ConfigError);
    CHECK_THROWS_AS(tail_bound(10, 1.0), ConfigError);
  }

  TEST_CASE("rule validation") {
    CHECK_NOTHROW(validate_rule(RunToCompletion{}, 5));
    CHECK_NOTHROW(validate_rule(PresetK{5}, 5));
    CHECK_THROWS_AS(validate_rule(PresetK{0}, 5), ConfigError);
    CHECK_THROWS_AS(validate_rule(PresetK{6}, 5), ConfigError);
    CHECK_THROWS_AS(validate_rule(CommCap{0}, 5), ConfigError);
    CHECK_THROWS_AS(validate_rule(CommCap{6}, 5), ConfigError);
    const std::vector<double> y{0.1, 0.2};
    CHECK_THROWS_AS(run_distributed_bh(y, 0.1, CommCap{3}), ConfigError);
    CHECK_THROWS_AS(run_distributed_bh(y, 1.0, RunToCompletion{}), ConfigError);
  }

  TEST_CASE("run to completion reproduces centralized BH exactly") {
    for (std::uint32_t c = 0; c < 10000; ++c) {
      Rng g = gen::case_rng(30, c);
      const std::size_t m = gen::size_in(g, 1, 1000);
      const auto y = gen::statistics(g, m, c % 5 == 0 ? 0.001 : 0.0);
      const double gamma = gen::real_in(g, 0.01, 0.5);
      const auto r = run_distributed_bh(y, gamma, RunToCompletion{}, {.record_rounds = false});
      const auto bh = bh_procedure(y, gamma);
      CAPTURE(c);
      REQUIRE(r.rejected.indices == bh.indices);
      REQUIRE(r.t_max == bh.threshold_index);
    }
  }

  TEST_CASE("event-driven and lockstep simulations agree under every rule") {
    for (std::uint32_t c = 0; c < 1000; ++c) {
      Rng g = gen::case_rng(31, c);
      const std::size_t m = gen::size_in(g, 1, 300);
      const auto y = gen::statistics(g, m, c % 3 == 0 ? 0.005 : 0.0);
      const double gamma = gen::real_in(g, 0.01, 0.5);
      const auto rule = random_rule(g, m);
      const auto fast = run_distributed_bh(y, gamma, rule);
      const auto slow = run_distributed_bh_lockstep(y, gamma, rule);
      CAPTURE(c);
      REQUIRE(fast.rejected.indices == slow.rejected.indices);
      REQUIRE(fast.messages == slow.messages);
      REQUIRE(fast.t_max == slow.t_max);
      REQUIRE(fast.rounds.size() == slow.rounds.size());
      for (std::size_t t = 0; t < fast.rounds.size(); ++t) {
        CHECK(fast.rounds[t].count == slow.rounds[t].count);
        CHECK(fast.rounds[t].announced == slow.rounds[t].announced);
      }
    }
  }

  TEST_CASE("round logs obey the switching relation and message accounting") {
    for (std::uint32_t c = 0; c < 2000; ++c) {
      Rng g = gen::case_rng(32, c);
      const std::size_t m = gen::size_in(g, 1, 400);
      const auto y = gen::statistics(g, m, c % 4 == 0 ? 0.003 : 0.0);
      const double gamma = gen::real_in(g, 0.01, 0.5);
      const auto rule = random_rule(g, m);
      const auto r = run_distributed_bh(y, gamma, rule);
      const auto* cap = std::get_if<CommCap>(&rule);
      CAPTURE(c);

      std::size_t previous = 0;
      for (const auto& log : r.rounds) {
        CHECK(log.threshold == bh_threshold(log.threshold_index, gamma, m));
        CHECK(log.count >= previous);
        CHECK(log.announced == log.count - previous);
        const std::size_t uncapped = count_at_or_below(y, log.threshold);
        if (cap == nullptr) {
          CHECK(log.count == uncapped);
        } else {
          CHECK(log.count == std::min(uncapped, cap->cap));
        }
        previous = log.count;
      }
      CHECK(r.messages == previous);
      if (cap != nullptr) CHECK(r.messages <= cap->cap);

      // t_max is the last round with count_t >= i_t, and the rejected set is
      // exactly the sensors that announced by then.
      std::size_t expect_tmax = 0;
      std::size_t count_at_tmax = 0;
      for (const auto& log : r.rounds) {
        if (log.count >= log.threshold_index) {
          expect_tmax = log.t;
          count_at_tmax = log.count;
        }
      }
      CHECK(r.t_max == expect_tmax);
      CHECK(r.rejected.size() == count_at_tmax);

      if (std::holds_alternative<RunToCompletion>(rule)) {
        // Without early exit, t_max is the BH crossing index max{i : y_(i) <= i gamma/m}.
        auto sorted = y;
        std::sort(sorted.begin(), sorted.end());
        std::size_t crossing = 0;
        for (std::size_t i = 1; i <= m; ++i) {
          if (sorted[i - 1] <= bh_threshold(i, gamma, m)) crossing = i;
        }
        CHECK(r.t_max == crossing);
      }
    }
  }

  TEST_CASE("each sensor broadcasts at most once and rejections are a prefix of ranks") {
    for (std::uint32_t c = 0; c < 500; ++c) {
      Rng g = gen::case_rng(33, c);
      const std::size_t m = gen::size_in(g, 2, 300);
      const auto y = gen::statistics(g, m);
      const auto rule = random_rule(g, m);
      const auto r = run_distributed_bh(y, 0.1, rule);
      CAPTURE(c);
      CHECK(r.messages <= m);
      CHECK(r.rejected.size() <= r.messages);
      const auto order = rank_order(y);
      Ids prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r.rejected.size()));
      std::sort(prefix.begin(), prefix.end());
      CHECK(r.rejected.indices == prefix);
    }
  }

  TEST_CASE("smaller caps never reject more") {
    for (std::uint32_t c = 0; c < 300; ++c) {
      Rng g = gen::case_rng(34, c);
      const std::size_t m = gen::size_in(g, 2, 500);
      const auto y = gen::statistics(g, m);
      const auto order = rank_order(y);
      std::size_t prev = 0;
      for (std::size_t cap = 1; cap <= m; cap += std::max<std::size_t>(1, m / 7)) {
        const auto r = run_distributed_bh_ranked(y, order, 0.1, CommCap{cap});
        CAPTURE(c);
        CHECK(r.rejected.size() >= prev);
        prev = r.rejected.size();
      }
    }
  }
}
