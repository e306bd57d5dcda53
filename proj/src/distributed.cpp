#include "snetfdr/distributed.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "snetfdr/errors.hpp"

namespace snetfdr {

void validate_rule(const StoppingRule& rule, std::size_t m) {
  if (const auto* p = std::get_if<PresetK>(&rule)) {
    if (p->k == 0 || p->k > m) {
      throw ConfigError(fmt::format("preset k = {} must lie in [1, m = {}]", p->k, m));
    }
  } else if (const auto* c = std::get_if<CommCap>(&rule)) {
    if (c->cap == 0 || c->cap > m) {
      throw ConfigError(fmt::format("communication cap {} must lie in [1, m = {}]", c->cap, m));
    }
  }
}

namespace {

void validate_inputs(std::span<const double> y, double gamma) {
  if (y.empty()) throw ConfigError("statistic vector is empty");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError(fmt::format("gamma = {} outside (0, 1)", gamma));
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw ConfigError(fmt::format("statistic {} = {} outside [0, 1]", i, y[i]));
    }
  }
}

}  // namespace

DistributedRunResult run_distributed_bh(std::span<const double> statistics, double gamma,
                                        const StoppingRule& rule,
                                        const DistributedOptions& opts) {
  validate_inputs(statistics, gamma);
  const auto order = rank_order(statistics);
  return run_distributed_bh_ranked(statistics, order, gamma, rule, opts);
}

DistributedRunResult run_distributed_bh_ranked(std::span<const double> statistics,
                                               std::span<const std::size_t> order,
                                               double gamma, const StoppingRule& rule,
                                               const DistributedOptions& opts) {
  const std::size_t m = statistics.size();
  if (order.size() != m) throw ConfigError("rank order does not match statistic vector");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError(fmt::format("gamma = {} outside (0, 1)", gamma));
  }
  validate_rule(rule, m);

  const auto* preset = std::get_if<PresetK>(&rule);
  const auto* cap = std::get_if<CommCap>(&rule);

  DistributedRunResult result;
  std::size_t next = 0;  // announcements happen in rank order
  std::size_t count = 0;
  std::size_t count_at_tmax = 0;
  for (std::size_t t = 1; t <= m; ++t) {
    const double level = bh_threshold(t, gamma, m);
    std::size_t announced = 0;
    while (next + announced < m && statistics[order[next + announced]] <= level) ++announced;

    bool capped = false;
    if (cap && count + announced > cap->cap) {
      announced = cap->cap - count;  // admit the smallest statistics first
      capped = true;
    }
    next += announced;
    count += announced;
    if (count >= t) {
      result.t_max = t;
      count_at_tmax = count;
    }
    if (opts.record_rounds) result.rounds.push_back({t, t, level, announced, count});

    if (capped) break;
    if (preset && announced == 0 && t >= preset->k) break;
  }

  result.messages = count;
  result.rejected.threshold_index = result.t_max;
  result.rejected.indices.assign(order.begin(),
                                 order.begin() + static_cast<std::ptrdiff_t>(count_at_tmax));
  std::sort(result.rejected.indices.begin(), result.rejected.indices.end());
  return result;
}

double robust_threshold(double gamma, double eps) {
  if (!(eps >= 0.0)) throw ConfigError("robustness eps must be non-negative");
  return gamma / (1.0 + eps);
}

double tail_bound(std::size_t k, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("tail-bound eps must lie in (0, 1)");
  return std::exp(-eps * eps * static_cast<double>(k) / (2.0 * (1.0 - eps)));
}

}  // namespace snetfdr
