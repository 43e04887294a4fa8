// Command-line harness: loads a scenario file, trains the selection
// multiplier for every sweep point and variant, evaluates adaptive and
// direct-only policies on paired channel traces, and writes a CSV.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "marc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Monte-Carlo simulator of a buffer-aided multiple-access relay uplink"};

  std::string config_path;
  std::string out_path;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> slots;
  std::string trace_path;
  std::string variants_text;
  int jobs = 0;

  app.add_option("--config", config_path, "Scenario file (INI format)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Output CSV path")->required();
  app.add_option("--seed", seed, "Master seed (overrides the scenario file)");
  app.add_option("--slots", slots,
                 "Evaluation slots per row (overrides the scenario file)");
  app.add_option("--trace", trace_path,
                 "Per-slot trace CSV (slow; forces sequential rows)");
  app.add_option("--variants", variants_text,
                 "KR:KB list, e.g. 1:1,2:3 (overrides the scenario file)");
  app.add_option("--jobs", jobs, "Max parallel rows (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  marc::Scenario scenario;
  try {
    scenario = marc::load_scenario(config_path);
    // Flag precedence: command line beats the scenario file.
    if (seed) {
      scenario.master_seed = *seed;
      scenario.trainer.seed = *seed;
    }
    if (slots) scenario.eval_slots = *slots;
    if (!variants_text.empty()) {
      scenario.variants = marc::parse_variants(variants_text);
      for (const marc::VariantSpec& v : scenario.variants) {
        marc::scenario_config(scenario, v, std::nullopt);  // validates limits
      }
    }
  } catch (const marc::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  }
  for (const std::string& warning : scenario.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }

  marc::ExperimentOptions options;
  options.trace_path = trace_path;
  options.max_parallel = jobs;
  options.log = &std::cout;

  try {
    const std::vector<marc::ResultRow> rows =
        marc::run_experiment(scenario, options);
    marc::write_result_csv(rows, out_path);
    std::cout << rows.size() << " rows written to " << out_path << '\n';
  } catch (const marc::IoError& err) {
    std::cerr << "i/o error: " << err.what() << '\n';
    return 2;
  } catch (const marc::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
