#pragma once

#include <functional>

#include "marc/policy.hpp"

namespace marc {

// Compensated (Neumaier) accumulator; keeps long running sums accurate to a
// few ulps independent of the number of terms.
class KahanSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Everything that happened in one slot of the real (buffer-clamped) run.
struct SlotOutcome {
  uint64_t slot = 0;
  Action action;
  double delivered_bits = 0.0;  // credited to throughput this slot
  double buffer_before = 0.0;
  double buffer_after = 0.0;
  double arrival = 0.0;    // bits pushed to the buffer (Store), else 0
  double departure = 0.0;  // bits drained from the buffer (Forward), else 0
};

struct ActionTally {
  uint64_t direct = 0;
  uint64_t store = 0;
  uint64_t forward = 0;
  std::vector<uint64_t> per_direct_subset;
  std::vector<uint64_t> per_store_subset;
  std::vector<uint64_t> per_forward_subset;

  uint64_t count(ActionKind kind) const {
    switch (kind) {
      case ActionKind::Direct:
        return direct;
      case ActionKind::Store:
        return store;
      default:
        return forward;
    }
  }
};

struct SimulationReport {
  uint64_t slots = 0;
  double tau_bar = 0.0;  // mean delivered bits/symbol per slot
  double tau_se = 0.0;   // Monte-Carlo standard error of tau_bar
  double arrival_rate = 0.0;
  double departure_rate = 0.0;
  ActionTally action_counts;
  double final_buffer = 0.0;
  double buffer_peak = 0.0;
  // Per-kind delivered totals divided by the slot count; they sum to tau_bar.
  double tau_direct = 0.0;
  double tau_store = 0.0;
  double tau_forward = 0.0;
};

using SlotSink = std::function<void(const SlotOutcome&)>;

// Executes one decision against the real buffer: Forward drains are clipped
// at the buffer level, Store pushes the relay-decoded remainder, Direct
// leaves the buffer untouched.
SlotOutcome apply_action(const ChannelState& state,
                         const SubsetCatalog& catalog,
                         const Decision& decision, BufferState& buffer);

// Slot-by-slot protocol run starting from an empty buffer: sample, select
// under `dual`, apply. `sink`, when set, receives every SlotOutcome.
SimulationReport run_simulation(const SystemConfig& cfg,
                                const SubsetCatalog& catalog,
                                DualVariable dual, uint64_t slots,
                                uint64_t seed, const SlotSink& sink = {});

// Same loop with selection forced to the best Direct subset every slot; the
// relay and buffer are never used. Pairs with run_simulation via the seed.
SimulationReport run_direct_baseline(const SystemConfig& cfg,
                                     const SubsetCatalog& catalog,
                                     uint64_t slots, uint64_t seed,
                                     const SlotSink& sink = {});

// Adaptive and direct-only policies evaluated on one shared channel trace,
// with the mean and standard error of the per-slot throughput difference.
struct PairedReport {
  SimulationReport adaptive;
  SimulationReport direct;
  double diff_mean = 0.0;  // adaptive minus direct
  double diff_se = 0.0;
};

PairedReport run_paired(const SystemConfig& cfg, const SubsetCatalog& catalog,
                        DualVariable dual, uint64_t slots, uint64_t seed,
                        const SlotSink& adaptive_sink = {},
                        const SlotSink& direct_sink = {});

}  // namespace marc
