#include "snetfdr/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "snetfdr/errors.hpp"

namespace snetfdr {
namespace {

void validate(std::span<const double> y, double gamma) {
  if (y.empty()) throw ConfigError("statistic vector is empty");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError(fmt::format("gamma = {} outside [0, 1]", gamma));
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw ConfigError(fmt::format("statistic {} = {} outside [0, 1]", i, y[i]));
    }
  }
}

RejectionSet threshold_rule(std::span<const double> y, double cut) {
  RejectionSet out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] <= cut) out.indices.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> rank_order(std::span<const double> y) {
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [y](std::size_t a, std::size_t b) {
    return y[a] < y[b] || (y[a] == y[b] && a < b);
  });
  return order;
}

RejectionSet bh_procedure(std::span<const double> y, double gamma) {
  validate(y, gamma);
  const std::size_t m = y.size();
  const auto order = rank_order(y);
  std::size_t i_max = 0;
  for (std::size_t i = m; i >= 1; --i) {
    if (y[order[i - 1]] <= bh_threshold(i, gamma, m)) {
      i_max = i;
      break;
    }
  }
  // Statistics tied with y_(i_max) sit at ranks <= i_max: any tie at rank
  // i_max + 1 would itself satisfy the step-up condition.
  RejectionSet out;
  out.threshold_index = i_max;
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i_max));
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

RejectionSet bonferroni(std::span<const double> y, double gamma) {
  validate(y, gamma);
  return threshold_rule(y, gamma / static_cast<double>(y.size()));
}

RejectionSet uncorrected(std::span<const double> y, double gamma) {
  validate(y, gamma);
  return threshold_rule(y, gamma);
}

namespace {

double oracle_log_cut(double pi) {
  if (!(pi > 0.0 && pi < 1.0)) {
    throw ConfigError(fmt::format("object density pi = {} outside (0, 1)", pi));
  }
  return std::log((1.0 - pi) / pi);
}

}  // namespace

RejectionSet bayes_oracle(const ObservationMatrix& x, const ObservationModel& model,
                          double pi) {
  const double cut = oracle_log_cut(pi);
  RejectionSet out;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    if (log_likelihood_ratio(model, x.row(s)) > cut) out.indices.push_back(s);
  }
  return out;
}

RejectionSet bayes_oracle(const ObservationMatrix& x,
                          std::span<const ObservationModel> models, double pi) {
  if (models.size() != x.rows()) {
    throw ConfigError(fmt::format("{} oracle models for {} sensors", models.size(), x.rows()));
  }
  const double cut = oracle_log_cut(pi);
  RejectionSet out;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    if (log_likelihood_ratio(models[s], x.row(s)) > cut) out.indices.push_back(s);
  }
  return out;
}

double OutcomeTable::false_discovery_proportion() const noexcept {
  return R == 0 ? 0.0 : static_cast<double>(V) / static_cast<double>(R);
}

double OutcomeTable::misclassification() const noexcept {
  return m == 0 ? 0.0 : static_cast<double>(V + T) / static_cast<double>(m);
}

double OutcomeTable::power() const noexcept {
  return m1 == 0 ? 1.0 : static_cast<double>(Z) / static_cast<double>(m1);
}

OutcomeTable outcome_table(const RejectionSet& decided, std::span<const Hypothesis> truth) {
  std::vector<bool> declared(truth.size(), false);
  for (std::size_t s : decided.indices) {
    if (s >= truth.size()) {
      throw ConfigError(fmt::format("rejected sensor {} outside label vector of size {}", s,
                                    truth.size()));
    }
    declared[s] = true;
  }
  OutcomeTable t;
  t.m = truth.size();
  for (std::size_t s = 0; s < truth.size(); ++s) {
    const bool sig = truth[s] == Hypothesis::significant;
    if (sig) {
      ++t.m1;
      ++(declared[s] ? t.Z : t.T);
    } else {
      ++t.m0;
      ++(declared[s] ? t.V : t.U);
    }
  }
  t.R = t.V + t.Z;
  return t;
}

double empirical_fdr(std::span<const OutcomeTable> tables) {
  if (tables.empty()) throw ConfigError("no outcome tables to average");
  double sum = 0.0;
  for (const auto& t : tables) sum += t.false_discovery_proportion();
  return sum / static_cast<double>(tables.size());
}

double error_rate(std::span<const OutcomeTable> tables) {
  if (tables.empty()) throw ConfigError("no outcome tables to average");
  double sum = 0.0;
  for (const auto& t : tables) sum += t.misclassification();
  return sum / static_cast<double>(tables.size());
}

}  // namespace snetfdr
