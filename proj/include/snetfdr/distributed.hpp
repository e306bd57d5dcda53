#pragma once

// Round-based broadcast form of the BH procedure. Every sensor compares its
// own statistic with the shared threshold l(i_t) = i_t * gamma / m and
// broadcasts once, the first round it falls below it. The network only
// shares the running announcement count.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "snetfdr/procedures.hpp"

namespace snetfdr {

struct RunToCompletion {};
/// Always run k rounds, then quit at the first silent round.
struct PresetK {
  std::size_t k = 1;
};
/// Never let the announcement count exceed `cap`.
struct CommCap {
  std::size_t cap = 1;
};

using StoppingRule = std::variant<RunToCompletion, PresetK, CommCap>;

struct SensorAgent {
  std::size_t sensor_id = 0;
  double statistic = 0.0;
  bool silent = true;    // has not broadcast yet
  bool decision = false; // currently declares H1
};

struct RoundLog {
  std::size_t t = 0;
  std::size_t threshold_index = 0;  // i_t
  double threshold = 0.0;           // i_t * gamma / m
  std::size_t announced = 0;        // r_t
  std::size_t count = 0;            // count_t
};

struct DistributedRunResult {
  RejectionSet rejected;
  std::size_t messages = 0;
  std::vector<RoundLog> rounds;  // empty unless requested
  std::size_t t_max = 0;         // 0 when no round had count_t >= i_t
};

struct DistributedOptions {
  bool record_rounds = true;
};

/// Event-driven simulation: statistics are ranked once and each round only
/// touches the sensors that cross the new threshold. O(m log m).
DistributedRunResult run_distributed_bh(std::span<const double> statistics, double gamma,
                                        const StoppingRule& rule,
                                        const DistributedOptions& opts = {});

/// Same protocol with the rank order supplied by the caller (as returned by
/// rank_order), for sweeps that rerun one statistic vector under many rules.
DistributedRunResult run_distributed_bh_ranked(std::span<const double> statistics,
                                               std::span<const std::size_t> order,
                                               double gamma, const StoppingRule& rule,
                                               const DistributedOptions& opts = {});

/// Literal lockstep simulation: every agent evaluates its rule every round.
/// O(m^2). Kept as the reference for the event-driven version.
DistributedRunResult run_distributed_bh_lockstep(std::span<const double> statistics,
                                                 double gamma, const StoppingRule& rule);

/// gamma / (1 + eps).
double robust_threshold(double gamma, double eps);

/// exp(-eps^2 k / (2 (1 - eps))), the Chernoff bound on P{Y_(k) > l_k}.
double tail_bound(std::size_t k, double eps);

void validate_rule(const StoppingRule& rule, std::size_t m);

}  // namespace snetfdr
