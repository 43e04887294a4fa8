#pragma once

#include <optional>

#include "marc/rates.hpp"

namespace marc {

// Multiplier weighting buffered bits against delivered bits in the
// per-slot selection metrics.
struct DualVariable {
  double lambda = 0.0;
};

// At or below this value relaying never pays off and selection degenerates
// to the best direct subset.
inline constexpr double kDirectOnlyLambda = -1.0;

struct Action {
  ActionKind kind = ActionKind::Direct;
  int subset_index = 0;

  bool operator==(const Action&) const = default;
};

struct MetricEntry {
  ActionKind kind;
  int subset_index;
  double metric;
};

// The single action chosen for a slot. metric_value is the winning metric;
// all_metrics is only materialized when diagnostics ask for it.
struct Decision {
  Action action;
  double metric_value = 0.0;
  std::optional<std::vector<MetricEntry>> all_metrics;
};

// Selection metric of a Direct candidate: its sum rate.
double direct_metric(const ChannelState& state, std::span<const int> subset);

// Selection metric of a Store candidate: zero when infeasible, otherwise
// (1+lambda) * rate-to-base - lambda * rate-to-relay.
double store_metric(const ChannelState& state, std::span<const int> subset,
                    DualVariable dual);

// Selection metric of a Forward candidate: direct sum rate plus (1+lambda)
// times the unclamped drain rate. The buffer level never enters the metric.
double forward_metric(const ChannelState& state, std::span<const int> subset,
                      DualVariable dual);

// Argmax of the metrics over every candidate action. Ties resolve to the
// earlier kind (Direct < Store < Forward), then the lower subset index.
// lambda <= kDirectOnlyLambda restricts the argmax to Direct candidates.
Decision select_action(const ChannelState& state, const SubsetCatalog& catalog,
                       DualVariable dual, bool collect_metrics = false);

// Best Direct subset regardless of lambda.
Decision select_direct_only(const ChannelState& state,
                            const SubsetCatalog& catalog);

}  // namespace marc
