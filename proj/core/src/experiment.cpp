#include "marc/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace marc {

namespace {

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

struct Job {
  size_t row_index;
  size_t sweep_index;
  std::optional<double> sweep_db;
  size_t variant_index;
  VariantSpec variant;
};

// Per-row trainer trace files get a row suffix so sweeps do not clobber a
// single path: trace.csv -> trace.row007.csv.
std::string trace_file_for_row(const std::string& base, size_t row,
                               size_t total_rows) {
  if (total_rows <= 1) return base;
  const std::filesystem::path p(base);
  std::filesystem::path out = p.parent_path();
  char suffix[24];
  std::snprintf(suffix, sizeof(suffix), ".row%03zu", row);
  out /= p.stem().string() + suffix + p.extension().string();
  return out.string();
}

}  // namespace

std::string result_csv_header() {
  return "scenario,sweep_db,k_r,k_b,lambda_star,tau_bar,tau_bar_direct,"
         "arrival_rate,departure_rate,residual,freq_direct,freq_store,"
         "freq_forward,seed,eval_slots,converged";
}

std::string result_csv_line(const ResultRow& row) {
  std::ostringstream out;
  out << row.scenario << ',';
  if (row.sweep_db) out << fmt(*row.sweep_db);
  out << ',' << row.relay_limit << ',' << row.base_limit << ','
      << fmt(row.lambda_star) << ',' << fmt(row.tau_bar) << ',';
  if (row.tau_bar_direct) out << fmt(*row.tau_bar_direct);
  out << ',' << fmt(row.arrival_rate) << ',' << fmt(row.departure_rate) << ','
      << fmt(row.residual) << ',' << fmt(row.freq_direct) << ','
      << fmt(row.freq_store) << ',' << fmt(row.freq_forward) << ','
      << row.seed << ',' << row.eval_slots << ',' << (row.converged ? 1 : 0);
  return out.str();
}

void write_result_csv(std::span<const ResultRow> rows,
                      const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << result_csv_header() << '\n';
    for (const ResultRow& row : rows) out << result_csv_line(row) << '\n';
    out.flush();
    if (!out) throw IoError("failed while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw IoError("cannot rename '" + tmp.string() + "' to '" +
                  target.string() + "': " + ec.message());
  }
}

std::vector<ResultRow> run_experiment(const Scenario& scenario,
                                      const ExperimentOptions& options) {
  std::vector<std::optional<double>> sweep_values;
  if (scenario.sweep) {
    for (double v : scenario.sweep->values_db) sweep_values.emplace_back(v);
  } else {
    sweep_values.emplace_back(std::nullopt);
  }

  std::vector<Job> jobs;
  for (size_t s = 0; s < sweep_values.size(); ++s) {
    for (size_t v = 0; v < scenario.variants.size(); ++v) {
      jobs.push_back(Job{jobs.size(), s, sweep_values[s], v,
                         scenario.variants[v]});
    }
  }
  std::vector<ResultRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());

  const bool tracing = !options.trace_path.empty();
  std::ofstream trace;
  std::mutex log_mutex;
  if (tracing) {
    trace.open(options.trace_path, std::ios::trunc);
    if (!trace) {
      throw IoError("cannot open trace file '" + options.trace_path + "'");
    }
    trace << "scenario,sweep_db,k_r,k_b,policy,slot,action_kind,subset,"
             "delivered,arrival,departure,buffer_after\n";
  }

  auto run_job = [&](const Job& job) {
    const SystemConfig cfg =
        scenario_config(scenario, job.variant, job.sweep_db);
    const SubsetCatalog catalog = enumerate_subsets(cfg);

    TrainerParams trainer = scenario.trainer;
    trainer.seed = rng::derive_seed(
        rng::derive_seed(scenario.master_seed, 0x74000000ULL + job.sweep_index),
        job.variant_index + 1);
    const TrainerResult trained = train_lambda(cfg, catalog, trainer);

    if (!scenario.trainer_trace_file.empty()) {
      const std::string path = trace_file_for_row(
          scenario.trainer_trace_file, job.row_index, jobs.size());
      std::ofstream out(path, std::ios::trunc);
      if (!out) throw IoError("cannot open trainer trace '" + path + "'");
      write_trace_csv(trained, out);
    }

    // The evaluation seed depends only on the sweep point, so every variant
    // (and the direct baseline) sees the identical channel trace.
    const uint64_t eval_seed =
        rng::derive_seed(scenario.master_seed, 0xe7000000ULL + job.sweep_index);

    SlotSink adaptive_sink;
    SlotSink direct_sink;
    if (tracing) {
      auto make_sink = [&, job](const char* policy) -> SlotSink {
        std::string prefix = scenario.name + ",";
        if (job.sweep_db) prefix += fmt(*job.sweep_db);
        prefix += "," + std::to_string(job.variant.relay_limit) + "," +
                  std::to_string(job.variant.base_limit) + "," + policy + ",";
        return [&trace, prefix, &catalog](const SlotOutcome& outcome) {
          const auto& subsets = catalog.subsets(outcome.action.kind);
          trace << prefix << outcome.slot << ','
                << to_string(outcome.action.kind) << ','
                << subset_label(
                       subsets[static_cast<size_t>(outcome.action.subset_index)])
                << ',' << fmt(outcome.delivered_bits) << ','
                << fmt(outcome.arrival) << ',' << fmt(outcome.departure) << ','
                << fmt(outcome.buffer_after) << '\n';
        };
      };
      adaptive_sink = make_sink("adaptive");
      if (scenario.direct_baseline) direct_sink = make_sink("direct");
    }

    ResultRow row;
    row.scenario = scenario.name;
    row.sweep_db = job.sweep_db;
    row.relay_limit = job.variant.relay_limit;
    row.base_limit = job.variant.base_limit;
    row.lambda_star = trained.lambda_star;
    row.converged = trained.converged;
    row.seed = eval_seed;
    row.eval_slots = scenario.eval_slots;

    const DualVariable dual{trained.lambda_star};
    SimulationReport report;
    if (scenario.direct_baseline) {
      const PairedReport paired =
          run_paired(cfg, catalog, dual, scenario.eval_slots, eval_seed,
                     adaptive_sink, direct_sink);
      report = paired.adaptive;
      row.tau_bar_direct = paired.direct.tau_bar;
      row.diff_se = paired.diff_se;
    } else {
      report = run_simulation(cfg, catalog, dual, scenario.eval_slots,
                              eval_seed, adaptive_sink);
    }
    row.tau_bar = report.tau_bar;
    row.tau_se = report.tau_se;
    row.arrival_rate = report.arrival_rate;
    row.departure_rate = report.departure_rate;
    row.residual =
        std::abs(report.arrival_rate - report.departure_rate) /
        std::max({report.arrival_rate, report.departure_rate, 1e-6});
    const double n = static_cast<double>(report.slots);
    row.freq_direct = static_cast<double>(report.action_counts.direct) / n;
    row.freq_store = static_cast<double>(report.action_counts.store) / n;
    row.freq_forward = static_cast<double>(report.action_counts.forward) / n;
    row.final_buffer = report.final_buffer;
    row.buffer_peak = report.buffer_peak;
    rows[job.row_index] = std::move(row);

    if (options.log) {
      std::scoped_lock lock(log_mutex);
      *options.log << scenario.name;
      if (job.sweep_db) *options.log << " sweep=" << fmt(*job.sweep_db);
      *options.log << " variant=" << job.variant.relay_limit << ':'
                   << job.variant.base_limit
                   << " lambda*=" << fmt(trained.lambda_star)
                   << (trained.converged ? "" : " [not converged]")
                   << " tau=" << fmt(rows[job.row_index].tau_bar);
      if (rows[job.row_index].tau_bar_direct) {
        *options.log << " direct=" << fmt(*rows[job.row_index].tau_bar_direct);
      }
      *options.log << std::endl;
    }
  };

  size_t workers = options.max_parallel > 0
                       ? static_cast<size_t>(options.max_parallel)
                       : std::max(1u, std::thread::hardware_concurrency());
  if (tracing) workers = 1;  // trace rows must come out in job order
  workers = std::min(workers, jobs.size());

  if (workers <= 1) {
    for (const Job& job : jobs) run_job(job);
  } else {
    std::atomic<size_t> next{0};
    auto drain = [&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) break;
        try {
          run_job(jobs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  if (tracing) {
    trace.flush();
    if (!trace) {
      throw IoError("failed while writing trace '" + options.trace_path + "'");
    }
  }
  return rows;
}

}  // namespace marc
