#include "marc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marc {

SlotOutcome apply_action(const ChannelState& state,
                         const SubsetCatalog& catalog,
                         const Decision& decision, BufferState& buffer) {
  SlotOutcome outcome;
  outcome.slot = state.slot_index;
  outcome.action = decision.action;
  outcome.buffer_before = buffer.bits;
  const int index = decision.action.subset_index;
  switch (decision.action.kind) {
    case ActionKind::Direct: {
      const auto& subset = catalog.direct_subsets[static_cast<size_t>(index)];
      outcome.delivered_bits = direct_rate(state, subset, index).sum_rate_direct;
      break;
    }
    case ActionKind::Store: {
      const auto& subset = catalog.store_subsets[static_cast<size_t>(index)];
      const ActionRates rates = store_rates(state, subset, index);
      outcome.delivered_bits = rates.sum_rate_direct;
      outcome.arrival = rates.relay_rate;
      buffer.bits += rates.relay_rate;
      break;
    }
    case ActionKind::Forward: {
      const auto& subset = catalog.forward_subsets[static_cast<size_t>(index)];
      const ActionRates rates =
          forward_rates(state, subset, index, buffer, /*decouple=*/false);
      outcome.delivered_bits = rates.sum_rate_direct + rates.relay_rate;
      outcome.departure = rates.relay_rate;
      buffer.bits -= rates.relay_rate;
      break;
    }
  }
  outcome.buffer_after = buffer.bits;
  return outcome;
}

namespace {

class Aggregator {
 public:
  explicit Aggregator(const SubsetCatalog& catalog) {
    tally_.per_direct_subset.assign(catalog.direct_subsets.size(), 0);
    tally_.per_store_subset.assign(catalog.store_subsets.size(), 0);
    tally_.per_forward_subset.assign(catalog.forward_subsets.size(), 0);
  }

  void record(const SlotOutcome& outcome) {
    delivered_.add(outcome.delivered_bits);
    delivered_sq_.add(outcome.delivered_bits * outcome.delivered_bits);
    arrivals_.add(outcome.arrival);
    departures_.add(outcome.departure);
    peak_ = std::max(peak_, outcome.buffer_after);
    const size_t index = static_cast<size_t>(outcome.action.subset_index);
    switch (outcome.action.kind) {
      case ActionKind::Direct:
        ++tally_.direct;
        ++tally_.per_direct_subset[index];
        tau_direct_.add(outcome.delivered_bits);
        break;
      case ActionKind::Store:
        ++tally_.store;
        ++tally_.per_store_subset[index];
        tau_store_.add(outcome.delivered_bits);
        break;
      case ActionKind::Forward:
        ++tally_.forward;
        ++tally_.per_forward_subset[index];
        tau_forward_.add(outcome.delivered_bits);
        break;
    }
  }

  SimulationReport finish(uint64_t slots, double final_buffer) {
    SimulationReport report;
    report.slots = slots;
    const double n = static_cast<double>(slots);
    report.tau_bar = delivered_.value() / n;
    if (slots > 1) {
      const double var =
          (delivered_sq_.value() - n * report.tau_bar * report.tau_bar) /
          (n - 1.0);
      report.tau_se = std::sqrt(std::max(var, 0.0) / n);
    }
    report.arrival_rate = arrivals_.value() / n;
    report.departure_rate = departures_.value() / n;
    report.action_counts = std::move(tally_);
    report.final_buffer = final_buffer;
    report.buffer_peak = peak_;
    report.tau_direct = tau_direct_.value() / n;
    report.tau_store = tau_store_.value() / n;
    report.tau_forward = tau_forward_.value() / n;
    return report;
  }

 private:
  KahanSum delivered_, delivered_sq_, arrivals_, departures_;
  KahanSum tau_direct_, tau_store_, tau_forward_;
  ActionTally tally_;
  double peak_ = 0.0;
};

template <typename DecideFn>
SimulationReport run_loop(const SystemConfig& cfg,
                          const SubsetCatalog& catalog, uint64_t slots,
                          uint64_t seed, DecideFn&& decide,
                          const SlotSink& sink) {
  if (slots == 0) {
    throw std::invalid_argument("run_simulation: slot count must be >= 1");
  }
  ChannelSampler sampler(cfg, seed);
  ChannelState state;
  BufferState buffer;
  Aggregator aggregator(catalog);
  for (uint64_t slot = 0; slot < slots; ++slot) {
    sampler.sample_into(slot, state);
    const Decision decision = decide(state);
    const SlotOutcome outcome =
        apply_action(state, catalog, decision, buffer);
    aggregator.record(outcome);
    if (sink) sink(outcome);
  }
  return aggregator.finish(slots, buffer.bits);
}

}  // namespace

SimulationReport run_simulation(const SystemConfig& cfg,
                                const SubsetCatalog& catalog,
                                DualVariable dual, uint64_t slots,
                                uint64_t seed, const SlotSink& sink) {
  return run_loop(
      cfg, catalog, slots, seed,
      [&](const ChannelState& state) {
        return select_action(state, catalog, dual);
      },
      sink);
}

SimulationReport run_direct_baseline(const SystemConfig& cfg,
                                     const SubsetCatalog& catalog,
                                     uint64_t slots, uint64_t seed,
                                     const SlotSink& sink) {
  return run_loop(
      cfg, catalog, slots, seed,
      [&](const ChannelState& state) {
        return select_direct_only(state, catalog);
      },
      sink);
}

PairedReport run_paired(const SystemConfig& cfg, const SubsetCatalog& catalog,
                        DualVariable dual, uint64_t slots, uint64_t seed,
                        const SlotSink& adaptive_sink,
                        const SlotSink& direct_sink) {
  if (slots == 0) {
    throw std::invalid_argument("run_paired: slot count must be >= 1");
  }
  ChannelSampler sampler(cfg, seed);
  ChannelState state;
  BufferState adaptive_buffer;
  BufferState direct_buffer;
  Aggregator adaptive_agg(catalog);
  Aggregator direct_agg(catalog);
  KahanSum diff, diff_sq;
  for (uint64_t slot = 0; slot < slots; ++slot) {
    sampler.sample_into(slot, state);
    const SlotOutcome adaptive_outcome = apply_action(
        state, catalog, select_action(state, catalog, dual), adaptive_buffer);
    const SlotOutcome direct_outcome = apply_action(
        state, catalog, select_direct_only(state, catalog), direct_buffer);
    adaptive_agg.record(adaptive_outcome);
    direct_agg.record(direct_outcome);
    const double d =
        adaptive_outcome.delivered_bits - direct_outcome.delivered_bits;
    diff.add(d);
    diff_sq.add(d * d);
    if (adaptive_sink) adaptive_sink(adaptive_outcome);
    if (direct_sink) direct_sink(direct_outcome);
  }
  PairedReport report;
  report.adaptive = adaptive_agg.finish(slots, adaptive_buffer.bits);
  report.direct = direct_agg.finish(slots, direct_buffer.bits);
  const double n = static_cast<double>(slots);
  report.diff_mean = diff.value() / n;
  if (slots > 1) {
    const double var =
        (diff_sq.value() - n * report.diff_mean * report.diff_mean) / (n - 1.0);
    report.diff_se = std::sqrt(std::max(var, 0.0) / n);
  }
  return report;
}

}  // namespace marc
