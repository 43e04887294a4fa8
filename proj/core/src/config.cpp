#include "marc/config.hpp"

#include <sstream>

namespace marc {

std::string LinkId::name() const {
  switch (kind) {
    case LinkKind::UeToRelay:
      return "u" + std::to_string(ue + 1) + "r";
    case LinkKind::UeToBase:
      return "u" + std::to_string(ue + 1) + "b";
    case LinkKind::RelayToBase:
      return "rb";
  }
  return "?";
}

double SystemConfig::link_gain(const LinkId& link) const {
  switch (link.kind) {
    case LinkKind::UeToRelay:
      return gain_ue_relay.at(static_cast<size_t>(link.ue));
    case LinkKind::UeToBase:
      return gain_ue_base.at(static_cast<size_t>(link.ue));
    case LinkKind::RelayToBase:
      return gain_relay_base;
  }
  throw ConfigError("unknown link kind");
}

std::vector<std::string> SystemConfig::validate() const {
  std::ostringstream err;
  if (num_ues < 1) {
    err << "num_ues must be >= 1, got " << num_ues;
  } else if (relay_access_limit < 1 || relay_access_limit > num_ues) {
    err << "relay_access_limit must be in [1, " << num_ues << "], got "
        << relay_access_limit;
  } else if (base_access_limit < 1 || base_access_limit > num_ues + 1) {
    err << "base_access_limit must be in [1, " << num_ues + 1 << "], got "
        << base_access_limit;
  } else if (!(snr_budget > 0.0) || !std::isfinite(snr_budget)) {
    err << "snr_budget must be positive and finite, got " << snr_budget;
  } else if (gain_ue_relay.size() != static_cast<size_t>(num_ues) ||
             gain_ue_base.size() != static_cast<size_t>(num_ues)) {
    err << "expected " << num_ues << " UE-to-relay and " << num_ues
        << " UE-to-base gains, got " << gain_ue_relay.size() << " and "
        << gain_ue_base.size();
  }
  std::string msg = err.str();
  if (!msg.empty()) throw ConfigError(msg);

  auto check_gain = [](double g, const std::string& what) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw ConfigError(what + " gain must be positive and finite, got " +
                        std::to_string(g));
    }
  };
  for (int m = 0; m < num_ues; ++m) {
    check_gain(gain_ue_relay[static_cast<size_t>(m)],
               LinkId{LinkKind::UeToRelay, m}.name());
    check_gain(gain_ue_base[static_cast<size_t>(m)],
               LinkId{LinkKind::UeToBase, m}.name());
  }
  check_gain(gain_relay_base, "rb");

  std::vector<std::string> warnings;
  if (base_access_limit < relay_access_limit) {
    warnings.push_back(
        "base_access_limit < relay_access_limit: unusual, but allowed");
  }
  return warnings;
}

SystemConfig make_config_db(int num_ues, int relay_access_limit,
                            int base_access_limit, double snr_budget_db,
                            const std::vector<double>& omega_db) {
  if (num_ues < 1) throw ConfigError("num_ues must be >= 1");
  const size_t expected = 2 * static_cast<size_t>(num_ues) + 1;
  if (omega_db.size() != expected) {
    throw ConfigError("expected " + std::to_string(expected) +
                      " gains (2M+1 for M=" + std::to_string(num_ues) +
                      "), got " + std::to_string(omega_db.size()));
  }
  SystemConfig cfg;
  cfg.num_ues = num_ues;
  cfg.relay_access_limit = relay_access_limit;
  cfg.base_access_limit = base_access_limit;
  cfg.snr_budget = db_to_linear(snr_budget_db);
  cfg.gain_ue_relay.resize(static_cast<size_t>(num_ues));
  cfg.gain_ue_base.resize(static_cast<size_t>(num_ues));
  for (int m = 0; m < num_ues; ++m) {
    cfg.gain_ue_relay[static_cast<size_t>(m)] =
        db_to_linear(omega_db[static_cast<size_t>(m)]);
    cfg.gain_ue_base[static_cast<size_t>(m)] =
        db_to_linear(omega_db[static_cast<size_t>(num_ues + m)]);
  }
  cfg.gain_relay_base = db_to_linear(omega_db[expected - 1]);
  cfg.validate();
  return cfg;
}

}  // namespace marc
