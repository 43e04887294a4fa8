#include "marc/policy.hpp"

namespace marc {

double direct_metric(const ChannelState& state, std::span<const int> subset) {
  return capacity(sum_snr(state.snr_ue_base, subset));
}

double store_metric(const ChannelState& state, std::span<const int> subset,
                    DualVariable dual) {
  if (!store_feasible(state, subset)) return 0.0;
  const double to_base = capacity(sum_snr(state.snr_ue_base, subset));
  const double to_relay = capacity(sum_snr(state.snr_ue_relay, subset));
  return (1.0 + dual.lambda) * to_base - dual.lambda * to_relay;
}

double forward_metric(const ChannelState& state, std::span<const int> subset,
                      DualVariable dual) {
  const double interference = sum_snr(state.snr_ue_base, subset);
  const double drain = capacity(state.snr_relay_base / (1.0 + interference));
  return capacity(interference) + (1.0 + dual.lambda) * drain;
}

namespace {

// Strict > keeps the earliest candidate on ties, which is exactly the
// documented tie-break given the scan order below.
struct Argmax {
  Action best{};
  double value = 0.0;
  bool seeded = false;

  void offer(ActionKind kind, int index, double metric) {
    if (!seeded || metric > value) {
      best = Action{kind, index};
      value = metric;
      seeded = true;
    }
  }
};

}  // namespace

Decision select_direct_only(const ChannelState& state,
                            const SubsetCatalog& catalog) {
  Argmax argmax;
  const auto& subsets = catalog.direct_subsets;
  for (size_t l = 0; l < subsets.size(); ++l) {
    argmax.offer(ActionKind::Direct, static_cast<int>(l),
                 direct_metric(state, subsets[l]));
  }
  return Decision{argmax.best, argmax.value, std::nullopt};
}

Decision select_action(const ChannelState& state, const SubsetCatalog& catalog,
                       DualVariable dual, bool collect_metrics) {
  if (dual.lambda <= kDirectOnlyLambda) {
    Decision decision = select_direct_only(state, catalog);
    if (collect_metrics) {
      std::vector<MetricEntry> table;
      table.reserve(catalog.direct_subsets.size());
      for (size_t l = 0; l < catalog.direct_subsets.size(); ++l) {
        table.push_back({ActionKind::Direct, static_cast<int>(l),
                         direct_metric(state, catalog.direct_subsets[l])});
      }
      decision.all_metrics = std::move(table);
    }
    return decision;
  }

  Argmax argmax;
  std::vector<MetricEntry> table;
  if (collect_metrics) {
    table.reserve(catalog.direct_subsets.size() +
                  catalog.store_subsets.size() +
                  catalog.forward_subsets.size());
  }
  auto scan = [&](ActionKind kind, const std::vector<UeSubset>& subsets,
                  auto&& metric_fn) {
    for (size_t l = 0; l < subsets.size(); ++l) {
      const double metric = metric_fn(subsets[l]);
      argmax.offer(kind, static_cast<int>(l), metric);
      if (collect_metrics) table.push_back({kind, static_cast<int>(l), metric});
    }
  };
  scan(ActionKind::Direct, catalog.direct_subsets,
       [&](const UeSubset& s) { return direct_metric(state, s); });
  scan(ActionKind::Store, catalog.store_subsets,
       [&](const UeSubset& s) { return store_metric(state, s, dual); });
  scan(ActionKind::Forward, catalog.forward_subsets,
       [&](const UeSubset& s) { return forward_metric(state, s, dual); });

  Decision decision{argmax.best, argmax.value, std::nullopt};
  if (collect_metrics) decision.all_metrics = std::move(table);
  return decision;
}

}  // namespace marc
