#include <algorithm>

#include <fmt/format.h>

#include "snetfdr/distributed.hpp"
#include "snetfdr/errors.hpp"

namespace snetfdr {

DistributedRunResult run_distributed_bh_lockstep(std::span<const double> statistics,
                                                 double gamma, const StoppingRule& rule) {
  const std::size_t m = statistics.size();
  if (m == 0) throw ConfigError("statistic vector is empty");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError(fmt::format("gamma = {} outside (0, 1)", gamma));
  }
  validate_rule(rule, m);

  std::vector<SensorAgent> agents(m);
  for (std::size_t s = 0; s < m; ++s) agents[s] = {s, statistics[s], true, false};
  std::vector<std::size_t> announce_round(m, 0);

  DistributedRunResult result;
  std::size_t count = 0;
  std::size_t i_t = 1;
  for (std::size_t t = 1;; ++t) {
    const double level = bh_threshold(i_t, gamma, m);

    std::vector<std::size_t> speakers;
    for (auto& a : agents) {
      a.decision = a.statistic <= level;
      if (a.silent && a.decision) speakers.push_back(a.sensor_id);
    }
    bool capped = false;
    if (const auto* c = std::get_if<CommCap>(&rule); c && count + speakers.size() > c->cap) {
      std::sort(speakers.begin(), speakers.end(), [&](std::size_t a, std::size_t b) {
        return statistics[a] < statistics[b] || (statistics[a] == statistics[b] && a < b);
      });
      speakers.resize(c->cap - count);
      capped = true;
    }
    for (std::size_t s : speakers) {
      agents[s].silent = false;
      announce_round[s] = t;
    }
    const std::size_t r_t = speakers.size();
    count += r_t;
    if (count >= i_t) result.t_max = t;
    result.rounds.push_back({t, i_t, level, r_t, count});

    const bool done = capped || i_t == m ||
                      (std::holds_alternative<PresetK>(rule) && r_t == 0 &&
                       i_t >= std::get<PresetK>(rule).k);
    if (done) break;
    ++i_t;
  }

  result.messages = count;
  result.rejected.threshold_index = result.t_max;
  for (const auto& a : agents) {
    if (!a.silent && announce_round[a.sensor_id] <= result.t_max) {
      result.rejected.indices.push_back(a.sensor_id);
    }
  }
  return result;
}

}  // namespace snetfdr
