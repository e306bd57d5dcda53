#pragma once

// Centralized decision rules over a vector of per-sensor statistics, and the
// confusion-table bookkeeping used to score them. Sensor ids are indices into
// the statistic vector.

#include <cstddef>
#include <span>
#include <vector>

#include "snetfdr/measure.hpp"
#include "snetfdr/types.hpp"

namespace snetfdr {

struct RejectionSet {
  std::vector<std::size_t> indices;  // ascending sensor ids
  /// i_max of a step-up rule; 0 when nothing is rejected or the rule has no
  /// rank threshold.
  std::size_t threshold_index = 0;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
};

/// i * gamma / m, shared by every rule that walks the BH threshold line.
inline double bh_threshold(std::size_t i, double gamma, std::size_t m) noexcept {
  return static_cast<double>(i) * gamma / static_cast<double>(m);
}

/// Sensor ids sorted by (statistic, id).
std::vector<std::size_t> rank_order(std::span<const double> y);

RejectionSet bh_procedure(std::span<const double> y, double gamma);
RejectionSet bonferroni(std::span<const double> y, double gamma);
RejectionSet uncorrected(std::span<const double> y, double gamma);

/// MAP rule with known object density pi: reject iff phi(x_s) > (1 - pi)/pi.
RejectionSet bayes_oracle(const ObservationMatrix& x, const ObservationModel& model,
                          double pi);
/// Same rule with a distinct true model per sensor.
RejectionSet bayes_oracle(const ObservationMatrix& x,
                          std::span<const ObservationModel> models, double pi);

struct OutcomeTable {
  std::size_t U = 0;  // true null, declared null
  std::size_t V = 0;  // true null, declared significant
  std::size_t T = 0;  // true significant, declared null
  std::size_t Z = 0;  // true significant, declared significant
  std::size_t m0 = 0;
  std::size_t m1 = 0;
  std::size_t m = 0;
  std::size_t R = 0;

  /// V/R with 0/0 read as 0.
  double false_discovery_proportion() const noexcept;
  /// (V + T)/m.
  double misclassification() const noexcept;
  /// Z/m1, read as 1 when m1 = 0.
  double power() const noexcept;
};

OutcomeTable outcome_table(const RejectionSet& decided, std::span<const Hypothesis> truth);

double empirical_fdr(std::span<const OutcomeTable> tables);
double error_rate(std::span<const OutcomeTable> tables);

}  // namespace snetfdr
