#pragma once

#include <iosfwd>

#include "marc/scenario.hpp"
#include "marc/simulator.hpp"

namespace marc {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One CSV line of an experiment: a (sweep value, variant) cell with its
// trained multiplier and paired evaluation results. `residual` is the
// normalized queue imbalance |arrival - departure| / max(arrival, departure,
// 1e-6); `seed` is the evaluation seed actually used for the channel trace.
struct ResultRow {
  std::string scenario;
  std::optional<double> sweep_db;
  int relay_limit = 0;
  int base_limit = 0;
  double lambda_star = 0.0;
  double tau_bar = 0.0;
  std::optional<double> tau_bar_direct;
  double arrival_rate = 0.0;
  double departure_rate = 0.0;
  double residual = 0.0;
  double freq_direct = 0.0;
  double freq_store = 0.0;
  double freq_forward = 0.0;
  uint64_t seed = 0;
  uint64_t eval_slots = 0;
  bool converged = false;

  // Extra diagnostics carried for consumers of the in-memory API; not part
  // of the CSV row.
  double tau_se = 0.0;
  double diff_se = 0.0;       // SE of the paired per-slot throughput diff
  double final_buffer = 0.0;
  double buffer_peak = 0.0;
};

struct ExperimentOptions {
  // When non-empty, every evaluated slot of every row is appended here
  // (forces rows to run sequentially).
  std::string trace_path;
  int max_parallel = 0;  // 0 = hardware concurrency
  std::ostream* log = nullptr;  // one summary line per row when set
};

// Trains lambda and runs the paired evaluation for every sweep value and
// variant. Rows come back in deterministic order (sweep-major, variant-minor)
// regardless of scheduling.
std::vector<ResultRow> run_experiment(const Scenario& scenario,
                                      const ExperimentOptions& options = {});

std::string result_csv_header();
std::string result_csv_line(const ResultRow& row);

// Writes header + rows atomically (temp file in the same directory, then
// rename). Throws IoError on any filesystem failure.
void write_result_csv(std::span<const ResultRow> rows,
                      const std::string& path);

}  // namespace marc
