#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "marc/trainer.hpp"

namespace marc {

struct SweepSpec {
  std::string parameter;         // omega_u<m>r, omega_u<m>b, omega_rb, snr_budget
  std::vector<double> values_db;
};

struct VariantSpec {
  int relay_limit = 1;
  int base_limit = 1;
};

// A fully described experiment: base system, trainer settings, optional
// one-dimensional dB sweep, and the (relay, base) access-limit variants to
// evaluate at every sweep point.
struct Scenario {
  std::string name = "scenario";
  SystemConfig cfg;               // linear scale, converted at load
  std::vector<double> omega_db;   // original dB gains, kept for reporting
  double snr_budget_db = 0.0;
  TrainerParams trainer;
  uint64_t eval_slots = 1000000;
  uint64_t master_seed = 1;
  std::optional<SweepSpec> sweep;
  std::vector<VariantSpec> variants;  // defaults to the [system] limits
  bool direct_baseline = true;
  std::string trainer_trace_file;     // empty = no trace
  std::vector<std::string> warnings;  // soft issues found at load
};

// Reads the documented INI-style format ([system], [trainer], [sweep],
// [output] sections, lower_snake_case keys, gains in dB). Malformed input
// raises ConfigError with a file:line anchor.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& display_name);

// "1:1,2:3" or whitespace-separated "1:1 2:3".
std::vector<VariantSpec> parse_variants(const std::string& text);

// The scenario's config with a variant's access limits and, when given, the
// swept parameter overridden (value in dB).
SystemConfig scenario_config(const Scenario& scenario,
                             const VariantSpec& variant,
                             std::optional<double> sweep_db);

}  // namespace marc
