#pragma once

#include <cstdint>
#include <vector>

#include "marc/config.hpp"

namespace marc {

namespace rng {

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer: bijective, full avalanche.
inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Deterministic seed derivation for independent sub-streams.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
  return mix64(mix64(seed + kGolden) + tag * kGolden);
}

}  // namespace rng

// One slot's channel realization, reduced to instantaneous SNRs. Phase never
// enters any rate expression, so only |h|^2 is materialized.
struct ChannelState {
  uint64_t slot_index = 0;
  std::vector<double> snr_ue_relay;  // per-UE SNR towards the relay
  std::vector<double> snr_ue_base;   // per-UE SNR towards the base
  double snr_relay_base = 0.0;

  bool operator==(const ChannelState&) const = default;
};

// Counter-based stream: every draw is a pure function of (key, draw index).
// Slots can therefore be sampled in any order or in parallel, and streams
// for different links never interfere.
struct RngStream {
  uint64_t key = 0;

  static RngStream derive(uint64_t seed, uint64_t stream_id) {
    return RngStream{rng::derive_seed(seed, stream_id)};
  }

  // Uniform in [0, 1), 53-bit resolution.
  double unit(uint64_t n) const {
    return static_cast<double>(rng::mix64(key + rng::kGolden * (n + 1)) >> 11) *
           0x1.0p-53;
  }

  // Exponential with the given mean; log1p keeps the draw finite for u -> 1.
  double exponential(uint64_t n, double mean) const {
    return -mean * std::log1p(-unit(n));
  }
};

// Rayleigh block fading: per slot, each link's power |h|^2 is an independent
// exponential with mean equal to the link gain, and SNR = snr_budget * |h|^2.
class ChannelSampler {
 public:
  ChannelSampler(const SystemConfig& cfg, uint64_t seed);

  ChannelState sample(uint64_t slot) const;
  void sample_into(uint64_t slot, ChannelState& out) const;

  const SystemConfig& config() const { return cfg_; }
  uint64_t seed() const { return seed_; }

 private:
  SystemConfig cfg_;
  uint64_t seed_;
  std::vector<RngStream> ue_relay_streams_;
  std::vector<RngStream> ue_base_streams_;
  RngStream relay_base_stream_;
};

// One-shot convenience wrapper around ChannelSampler.
ChannelState sample_slot(const SystemConfig& cfg, uint64_t seed, uint64_t slot);

}  // namespace marc
