#include "marc/scenario.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace marc {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
    --end;
  return s.substr(begin, end - begin);
}

struct Entry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

// Parsed key/value file with "file:line:" anchored errors.
class IniFile {
 public:
  IniFile(std::istream& in, std::string display_name)
      : name_(std::move(display_name)) {
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string text = trim(line);
      if (text.empty() || text[0] == '#' || text[0] == ';') continue;
      if (text.front() == '[') {
        if (text.back() != ']') fail(line_no, "unterminated section header");
        section = trim(text.substr(1, text.size() - 2));
        if (section.empty()) fail(line_no, "empty section name");
        continue;
      }
      const size_t eq = text.find('=');
      if (eq == std::string::npos) {
        fail(line_no, "expected 'key = value', got '" + text + "'");
      }
      const std::string key = trim(text.substr(0, eq));
      if (key.empty()) fail(line_no, "empty key");
      if (section.empty()) {
        fail(line_no, "key '" + key + "' appears before any [section]");
      }
      auto [it, inserted] =
          entries_[section].emplace(key, Entry{trim(text.substr(eq + 1)), line_no});
      if (!inserted) {
        fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
      }
    }
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    auto sec = entries_.find(section);
    if (sec == entries_.end()) return nullptr;
    auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(name_ + ":" + std::to_string(line) + ": " + message);
  }

  [[noreturn]] void fail_missing(const std::string& section,
                                 const std::string& key) const {
    throw ConfigError(name_ + ": missing required key '" + key + "' in [" +
                      section + "]");
  }

  // Flags typos: every key must be consumed by the loader.
  void check_all_used() const {
    for (const auto& [section, keys] : entries_) {
      for (const auto& [key, entry] : keys) {
        if (!entry.used) {
          fail(entry.line, "unknown key '" + key + "' in [" + section + "]");
        }
      }
    }
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::map<std::string, std::map<std::string, Entry>> entries_;
};

double to_double(const IniFile& file, const Entry& entry) {
  try {
    size_t pos = 0;
    const double v = std::stod(entry.value, &pos);
    if (pos != entry.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    file.fail(entry.line, "expected a number, got '" + entry.value + "'");
  }
}

int64_t to_int(const IniFile& file, const Entry& entry) {
  int64_t v = 0;
  const auto* begin = entry.value.data();
  const auto* end = begin + entry.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    file.fail(entry.line, "expected an integer, got '" + entry.value + "'");
  }
  return v;
}

bool to_bool(const IniFile& file, const Entry& entry) {
  if (entry.value == "true" || entry.value == "1" || entry.value == "yes")
    return true;
  if (entry.value == "false" || entry.value == "0" || entry.value == "no")
    return false;
  file.fail(entry.line, "expected a boolean, got '" + entry.value + "'");
}

std::vector<double> to_double_list(const IniFile& file, const Entry& entry) {
  std::vector<double> values;
  std::string token;
  std::istringstream stream(entry.value);
  while (stream >> token) {
    if (!token.empty() && token.back() == ',') token.pop_back();
    if (token.empty()) continue;
    try {
      size_t pos = 0;
      values.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      file.fail(entry.line, "expected numbers, got '" + token + "'");
    }
  }
  return values;
}

// Accepts omega_u<m>r, omega_u<m>b, omega_rb, snr_budget. Returns false if
// the name is not a sweepable parameter for this system size.
bool valid_sweep_parameter(const std::string& name, int num_ues) {
  if (name == "omega_rb" || name == "snr_budget") return true;
  if (name.rfind("omega_u", 0) != 0) return false;
  const std::string rest = name.substr(7);
  if (rest.size() < 2) return false;
  const char link = rest.back();
  if (link != 'r' && link != 'b') return false;
  int ue = 0;
  const auto* begin = rest.data();
  const auto* end = begin + rest.size() - 1;
  auto [ptr, ec] = std::from_chars(begin, end, ue);
  if (ec != std::errc{} || ptr != end) return false;
  return ue >= 1 && ue <= num_ues;
}

}  // namespace

std::vector<VariantSpec> parse_variants(const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }
  std::vector<VariantSpec> variants;
  std::string token;
  std::istringstream stream(normalized);
  while (stream >> token) {
    const size_t colon = token.find(':');
    const auto strict_int = [&](const std::string& digits) {
      int value = 0;
      const auto* begin = digits.data();
      const auto* end = begin + digits.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{} || ptr != end) {
        throw ConfigError("variant '" + token + "' is not of the form KR:KB");
      }
      return value;
    };
    if (colon == std::string::npos) {
      throw ConfigError("variant '" + token + "' is not of the form KR:KB");
    }
    VariantSpec v;
    v.relay_limit = strict_int(token.substr(0, colon));
    v.base_limit = strict_int(token.substr(colon + 1));
    variants.push_back(v);
  }
  if (variants.empty()) {
    throw ConfigError("variant list '" + text + "' is empty");
  }
  return variants;
}

Scenario parse_scenario(std::istream& in, const std::string& display_name) {
  IniFile file(in, display_name);
  Scenario scenario;

  // [system]
  const Entry* num_ues = file.find("system", "num_ues");
  if (!num_ues) file.fail_missing("system", "num_ues");
  const int m = static_cast<int>(to_int(file, *num_ues));
  if (m < 1) file.fail(num_ues->line, "num_ues must be >= 1");

  if (const Entry* e = file.find("system", "name")) {
    if (e->value.find(',') != std::string::npos) {
      file.fail(e->line, "scenario name must not contain commas");
    }
    scenario.name = e->value;
  }

  int relay_limit = 1;
  int base_limit = 1;
  if (const Entry* e = file.find("system", "relay_access_limit")) {
    relay_limit = static_cast<int>(to_int(file, *e));
  }
  if (const Entry* e = file.find("system", "base_access_limit")) {
    base_limit = static_cast<int>(to_int(file, *e));
  }

  const Entry* snr = file.find("system", "snr_budget_db");
  if (!snr) file.fail_missing("system", "snr_budget_db");
  scenario.snr_budget_db = to_double(file, *snr);

  const Entry* omega = file.find("system", "omega_db");
  if (!omega) file.fail_missing("system", "omega_db");
  scenario.omega_db = to_double_list(file, *omega);
  if (scenario.omega_db.size() != 2 * static_cast<size_t>(m) + 1) {
    file.fail(omega->line,
              "expected " + std::to_string(2 * m + 1) + " gains (2M+1 for M=" +
                  std::to_string(m) + "), got " +
                  std::to_string(scenario.omega_db.size()));
  }

  try {
    scenario.cfg = make_config_db(m, relay_limit, base_limit,
                                  scenario.snr_budget_db, scenario.omega_db);
    scenario.warnings = scenario.cfg.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(display_name + ": " + err.what());
  }

  // [trainer]
  if (const Entry* e = file.find("trainer", "lambda_init")) {
    scenario.trainer.lambda_init = to_double(file, *e);
  }
  if (const Entry* e = file.find("trainer", "step0")) {
    scenario.trainer.step0 = to_double(file, *e);
    if (!(scenario.trainer.step0 > 0)) {
      file.fail(e->line, "step0 must be positive");
    }
  }
  if (const Entry* e = file.find("trainer", "step_schedule")) {
    try {
      scenario.trainer.schedule = step_schedule_from_string(e->value);
    } catch (const ConfigError& err) {
      file.fail(e->line, err.what());
    }
  }
  if (const Entry* e = file.find("trainer", "batch_slots")) {
    const int64_t v = to_int(file, *e);
    if (v < 1) file.fail(e->line, "batch_slots must be >= 1");
    scenario.trainer.batch_slots = static_cast<uint64_t>(v);
  }
  if (const Entry* e = file.find("trainer", "tol")) {
    scenario.trainer.tol = to_double(file, *e);
    if (!(scenario.trainer.tol > 0)) file.fail(e->line, "tol must be positive");
  }
  if (const Entry* e = file.find("trainer", "max_iters")) {
    const int64_t v = to_int(file, *e);
    if (v < 1) file.fail(e->line, "max_iters must be >= 1");
    scenario.trainer.max_iters = static_cast<int>(v);
  }

  // [sweep]
  const Entry* parameter = file.find("sweep", "parameter");
  const Entry* values = file.find("sweep", "values_db");
  const Entry* from = file.find("sweep", "from_db");
  const Entry* to = file.find("sweep", "to_db");
  const Entry* step = file.find("sweep", "step_db");
  if (parameter) {
    SweepSpec sweep;
    sweep.parameter = parameter->value;
    if (!valid_sweep_parameter(sweep.parameter, m)) {
      file.fail(parameter->line,
                "sweep parameter '" + sweep.parameter +
                    "' does not name a gain (omega_u<m>r, omega_u<m>b, "
                    "omega_rb) or snr_budget");
    }
    if (values) {
      sweep.values_db = to_double_list(file, *values);
      if (sweep.values_db.empty()) {
        file.fail(values->line, "values_db is empty");
      }
    } else if (from && to && step) {
      const double lo = to_double(file, *from);
      const double hi = to_double(file, *to);
      const double delta = to_double(file, *step);
      if (!(delta > 0)) file.fail(step->line, "step_db must be positive");
      for (double v = lo; v <= hi + 1e-9; v += delta) sweep.values_db.push_back(v);
      if (sweep.values_db.empty()) {
        file.fail(from->line, "sweep range produced no values");
      }
    } else {
      file.fail(parameter->line,
                "sweep needs either values_db or from_db/to_db/step_db");
    }
    scenario.sweep = std::move(sweep);
  } else if (values || from || to || step) {
    throw ConfigError(display_name +
                      ": [sweep] section is missing the 'parameter' key");
  }

  // [output]
  if (const Entry* e = file.find("output", "eval_slots")) {
    const int64_t v = to_int(file, *e);
    if (v < 1) file.fail(e->line, "eval_slots must be >= 1");
    scenario.eval_slots = static_cast<uint64_t>(v);
  }
  if (const Entry* e = file.find("output", "seed")) {
    scenario.master_seed = static_cast<uint64_t>(to_int(file, *e));
  }
  if (const Entry* e = file.find("output", "variants")) {
    try {
      scenario.variants = parse_variants(e->value);
    } catch (const ConfigError& err) {
      file.fail(e->line, err.what());
    }
  } else {
    scenario.variants = {VariantSpec{relay_limit, base_limit}};
  }
  if (const Entry* e = file.find("output", "direct_baseline")) {
    scenario.direct_baseline = to_bool(file, *e);
  }
  if (const Entry* e = file.find("output", "trainer_trace_file")) {
    scenario.trainer_trace_file = e->value;
  }

  file.check_all_used();

  // Variants must be valid access limits for this system size.
  for (const VariantSpec& v : scenario.variants) {
    SystemConfig probe = scenario.cfg;
    probe.relay_access_limit = v.relay_limit;
    probe.base_access_limit = v.base_limit;
    try {
      probe.validate();
    } catch (const ConfigError& err) {
      throw ConfigError(display_name + ": variant " +
                        std::to_string(v.relay_limit) + ":" +
                        std::to_string(v.base_limit) + ": " + err.what());
    }
  }
  scenario.trainer.seed = scenario.master_seed;
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file '" + path + "'");
  }
  return parse_scenario(in, std::filesystem::path(path).filename().string());
}

SystemConfig scenario_config(const Scenario& scenario,
                             const VariantSpec& variant,
                             std::optional<double> sweep_db) {
  SystemConfig cfg = scenario.cfg;
  cfg.relay_access_limit = variant.relay_limit;
  cfg.base_access_limit = variant.base_limit;
  if (sweep_db) {
    if (!scenario.sweep) {
      throw ConfigError("sweep value given but the scenario has no sweep");
    }
    const std::string& name = scenario.sweep->parameter;
    const double linear = db_to_linear(*sweep_db);
    if (name == "snr_budget") {
      cfg.snr_budget = linear;
    } else if (name == "omega_rb") {
      cfg.gain_relay_base = linear;
    } else {
      const size_t ue = std::stoul(name.substr(7)) - 1;  // omega_u<m>{r,b}
      if (name.back() == 'r') {
        cfg.gain_ue_relay.at(ue) = linear;
      } else {
        cfg.gain_ue_base.at(ue) = linear;
      }
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace marc
