#include "marc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marc {

double capacity(double snr) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::domain_error("capacity: SNR must be finite and >= 0, got " +
                            std::to_string(snr));
  }
  return std::log2(1.0 + snr);
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Direct:
      return "direct";
    case ActionKind::Store:
      return "store";
    case ActionKind::Forward:
      return "forward";
  }
  return "?";
}

std::string subset_label(std::span<const int> subset) {
  if (subset.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) out += '+';
    out += std::to_string(subset[i] + 1);
  }
  return out;
}

namespace {

// All k-combinations of {0..n-1}, lexicographic by member indices.
std::vector<UeSubset> combinations(int n, int k) {
  std::vector<UeSubset> out;
  UeSubset current(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) current[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      current[static_cast<size_t>(j)] = current[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return out;
}

}  // namespace

SubsetCatalog enumerate_subsets(const SystemConfig& cfg) {
  cfg.validate();
  SubsetCatalog catalog;
  catalog.direct_subsets =
      combinations(cfg.num_ues, std::min(cfg.base_access_limit, cfg.num_ues));
  catalog.store_subsets = combinations(cfg.num_ues, cfg.relay_access_limit);
  catalog.forward_subsets = combinations(cfg.num_ues, cfg.base_access_limit - 1);
  return catalog;
}

double sum_snr(std::span<const double> snr, std::span<const int> subset) {
  double total = 0.0;
  for (int ue : subset) total += snr[static_cast<size_t>(ue)];
  return total;
}

ActionRates direct_rate(const ChannelState& state, std::span<const int> subset,
                        int subset_index) {
  ActionRates rates;
  rates.kind = ActionKind::Direct;
  rates.subset_index = subset_index;
  rates.sum_rate_direct = capacity(sum_snr(state.snr_ue_base, subset));
  rates.relay_rate = 0.0;
  return rates;
}

bool store_feasible(const ChannelState& state, std::span<const int> subset) {
  for (int ue : subset) {
    const size_t i = static_cast<size_t>(ue);
    if (!(state.snr_ue_relay[i] > state.snr_ue_base[i])) return false;
  }
  return true;
}

ActionRates store_rates(const ChannelState& state, std::span<const int> subset,
                        int subset_index) {
  if (!store_feasible(state, subset)) {
    throw std::logic_error(
        "store_rates: subset is not feasible for partial decoding; gate on "
        "store_feasible first");
  }
  const double to_base = capacity(sum_snr(state.snr_ue_base, subset));
  const double to_relay = capacity(sum_snr(state.snr_ue_relay, subset));
  ActionRates rates;
  rates.kind = ActionKind::Store;
  rates.subset_index = subset_index;
  rates.sum_rate_direct = to_base;
  rates.relay_rate = to_relay - to_base;
  return rates;
}

ActionRates forward_rates(const ChannelState& state,
                          std::span<const int> subset, int subset_index,
                          const BufferState& buffer, bool decouple) {
  const double interference = sum_snr(state.snr_ue_base, subset);
  const double unclamped = capacity(state.snr_relay_base / (1.0 + interference));
  ActionRates rates;
  rates.kind = ActionKind::Forward;
  rates.subset_index = subset_index;
  rates.sum_rate_direct = capacity(interference);
  rates.relay_rate = decouple ? unclamped : std::min(buffer.bits, unclamped);
  return rates;
}

}  // namespace marc
