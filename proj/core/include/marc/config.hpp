#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace marc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

enum class LinkKind : int {
  UeToRelay = 1,
  UeToBase = 2,
  RelayToBase = 3,
};

// Identifies one fading link. `ue` is the 0-based source index for the
// UE-originated kinds and ignored for the relay-to-base link.
struct LinkId {
  LinkKind kind = LinkKind::RelayToBase;
  int ue = -1;

  // Stable stream tag, independent of the number of UEs in the system.
  uint64_t stream_id() const {
    return (static_cast<uint64_t>(kind) << 32) |
           static_cast<uint64_t>(ue >= 0 ? ue : 0);
  }

  std::string name() const;
};

// Static description of the uplink: M user equipments, one relay with an
// unbounded buffer, one base station. Gains and the SNR budget are linear
// scale; dB exists only at the config-file boundary.
struct SystemConfig {
  int num_ues = 0;             // M
  int relay_access_limit = 1;  // max transmitters the relay decodes at once
  int base_access_limit = 1;   // max transmitters the base decodes at once
  double snr_budget = 1.0;     // transmit power over noise density, linear

  std::vector<double> gain_ue_relay;  // mean |h|^2 of each UE-to-relay link
  std::vector<double> gain_ue_base;   // mean |h|^2 of each UE-to-base link
  double gain_relay_base = 1.0;       // mean |h|^2 of the relay-to-base link

  double link_gain(const LinkId& link) const;

  // Throws ConfigError on hard violations. Soft issues (a relay access limit
  // above the base one) come back as warning strings.
  std::vector<std::string> validate() const;
};

// Builds a config from the flat gain vector [u1r..uMr, u1b..uMb, rb] in dB.
// This is the single dB-to-linear conversion point for system gains.
SystemConfig make_config_db(int num_ues, int relay_access_limit,
                            int base_access_limit, double snr_budget_db,
                            const std::vector<double>& omega_db);

}  // namespace marc
