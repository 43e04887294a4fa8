#pragma once

#include <span>
#include <string>
#include <vector>

#include "marc/channel.hpp"

namespace marc {

// Shannon rate of a Gaussian channel at SNR x, in bits/symbol.
// Throws std::domain_error for negative or non-finite input.
double capacity(double snr);

// The three transmission modes:
//   Direct  - a set of UEs sends straight to the base, relay idle.
//   Store   - a set of UEs sends; the base decodes what it can, the relay
//             decodes everything and buffers the remainder.
//   Forward - the relay drains buffered information to the base while the
//             remaining base capacity serves new direct traffic.
enum class ActionKind : int { Direct = 0, Store = 1, Forward = 2 };

const char* to_string(ActionKind kind);

using UeSubset = std::vector<int>;  // 0-based UE indices, sorted ascending

// "1+3" for UEs {0,2}; "-" for the empty subset.
std::string subset_label(std::span<const int> subset);

// Candidate transmitter subsets per mode, lexicographic by member indices.
struct SubsetCatalog {
  std::vector<UeSubset> direct_subsets;   // size min(base_limit, M) each
  std::vector<UeSubset> store_subsets;    // size relay_limit each
  std::vector<UeSubset> forward_subsets;  // size base_limit - 1 each

  const std::vector<UeSubset>& subsets(ActionKind kind) const {
    switch (kind) {
      case ActionKind::Direct:
        return direct_subsets;
      case ActionKind::Store:
        return store_subsets;
      default:
        return forward_subsets;
    }
  }
};

SubsetCatalog enumerate_subsets(const SystemConfig& cfg);

// Realized rates of one candidate action in one slot.
struct ActionRates {
  ActionKind kind = ActionKind::Direct;
  int subset_index = 0;
  double sum_rate_direct = 0.0;  // decoded at the base within the slot
  double relay_rate = 0.0;  // Store: pushed to the buffer; Forward: drained
};

// Normalized information queued at the relay, bits/symbol. Never negative:
// a Forward drain is clipped at the current level.
struct BufferState {
  double bits = 0.0;
};

double sum_snr(std::span<const double> snr, std::span<const int> subset);

// Direct mode: the subset's multiple-access sum rate towards the base.
ActionRates direct_rate(const ChannelState& state, std::span<const int> subset,
                        int subset_index = 0);

// Store mode gate: every member must reach the relay at a strictly higher
// SNR than the base. Element-wise dominance is equivalent to requiring the
// strict sum inequality on every non-empty sub-subset.
bool store_feasible(const ChannelState& state, std::span<const int> subset);

// Store mode split: the base decodes up to its own sum capacity, the relay
// buffers the rest. Caller must have checked store_feasible; throws
// std::logic_error otherwise.
ActionRates store_rates(const ChannelState& state, std::span<const int> subset,
                        int subset_index = 0);

// Forward mode: the relay's signal is decoded first at the base, treating the
// subset's direct transmissions as interference. With decouple=false the
// drain is clipped at the buffer level; decouple=true returns the unclamped
// rate the selection policy and trainer reason with.
ActionRates forward_rates(const ChannelState& state,
                          std::span<const int> subset, int subset_index,
                          const BufferState& buffer, bool decouple);

}  // namespace marc
