#include "marc/channel.hpp"

namespace marc {

ChannelSampler::ChannelSampler(const SystemConfig& cfg, uint64_t seed)
    : cfg_(cfg), seed_(seed) {
  cfg_.validate();
  ue_relay_streams_.reserve(static_cast<size_t>(cfg_.num_ues));
  ue_base_streams_.reserve(static_cast<size_t>(cfg_.num_ues));
  for (int m = 0; m < cfg_.num_ues; ++m) {
    ue_relay_streams_.push_back(
        RngStream::derive(seed, LinkId{LinkKind::UeToRelay, m}.stream_id()));
    ue_base_streams_.push_back(
        RngStream::derive(seed, LinkId{LinkKind::UeToBase, m}.stream_id()));
  }
  relay_base_stream_ =
      RngStream::derive(seed, LinkId{LinkKind::RelayToBase, -1}.stream_id());
}

void ChannelSampler::sample_into(uint64_t slot, ChannelState& out) const {
  const size_t m = static_cast<size_t>(cfg_.num_ues);
  out.slot_index = slot;
  out.snr_ue_relay.resize(m);
  out.snr_ue_base.resize(m);
  for (size_t i = 0; i < m; ++i) {
    out.snr_ue_relay[i] = cfg_.snr_budget * ue_relay_streams_[i].exponential(
                                                slot, cfg_.gain_ue_relay[i]);
    out.snr_ue_base[i] = cfg_.snr_budget * ue_base_streams_[i].exponential(
                                               slot, cfg_.gain_ue_base[i]);
  }
  out.snr_relay_base =
      cfg_.snr_budget *
      relay_base_stream_.exponential(slot, cfg_.gain_relay_base);
}

ChannelState ChannelSampler::sample(uint64_t slot) const {
  ChannelState state;
  sample_into(slot, state);
  return state;
}

ChannelState sample_slot(const SystemConfig& cfg, uint64_t seed,
                         uint64_t slot) {
  return ChannelSampler(cfg, seed).sample(slot);
}

}  // namespace marc
