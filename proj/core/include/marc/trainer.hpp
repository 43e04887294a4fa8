#pragma once

#include <iosfwd>

#include "marc/policy.hpp"

namespace marc {

enum class StepSchedule : int { Constant = 0, Inverse = 1, InverseSqrt = 2 };

const char* to_string(StepSchedule schedule);
StepSchedule step_schedule_from_string(const std::string& name);

struct TrainerParams {
  double lambda_init = 0.0;
  double step0 = 0.5;
  StepSchedule schedule = StepSchedule::Inverse;
  // Monte-Carlo slots per gradient estimate; 1e4 or more keeps the
  // estimator noise well below typical convergence thresholds.
  uint64_t batch_slots = 100000;
  double tol = 1e-3;              // stop when |delta_lambda| falls below
  int max_iters = 200;
  uint64_t seed = 1;
};

struct TraceEntry {
  int iteration;
  double lambda;
  double delta_lambda;
  double step;
};

struct TrainerResult {
  double lambda_star = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |delta_lambda| at the stopping iteration
  bool converged = false;
  // True when lambda fell to <= -1: relaying never pays off and the final
  // policy is direct-only. Treated as a terminal classification.
  bool direct_only = false;
  std::vector<TraceEntry> trace;
};

// Batch statistics under the decoupled dynamics: Forward drains are never
// clipped by the buffer, matching what the selection metrics assume.
struct BatchStats {
  double arrival_rate = 0.0;    // mean bits/slot pushed by Store selections
  double departure_rate = 0.0;  // mean bits/slot drained by Forward selections
  double throughput = 0.0;      // mean delivered bits/slot
};

// Contribution of one slot's decision to the queue-balance gradient:
// buffered amount for Store, minus the unclamped drain for Forward, zero
// for Direct.
double gradient_sample(const ChannelState& state, const SubsetCatalog& catalog,
                       const Decision& decision);

BatchStats evaluate_decoupled_batch(const SystemConfig& cfg,
                                    const SubsetCatalog& catalog,
                                    DualVariable dual, uint64_t batch_slots,
                                    uint64_t seed);

// Monte-Carlo estimate of the balance gradient: average buffer arrival rate
// minus average (unclamped) departure rate under the policy at `dual`.
double estimate_gradient(DualVariable dual, const SystemConfig& cfg,
                         const SubsetCatalog& catalog, uint64_t batch_slots,
                         uint64_t seed);

// Lagrangian value of a batch: the decoupled throughput minus lambda times
// the balance violation. Unlike the clamped throughput, which peaks sharply
// at the balanced multiplier, this is flat around it and matches the
// operational throughput there.
inline double dual_objective(const BatchStats& stats, DualVariable dual) {
  return stats.throughput -
         dual.lambda * (stats.arrival_rate - stats.departure_rate);
}

// Iterates lambda[s+1] = lambda[s] + step[s] * gradient[s] on fresh batches
// until |gradient| <= tol, lambda falls to <= -1, or max_iters.
TrainerResult train_lambda(const SystemConfig& cfg,
                           const SubsetCatalog& catalog,
                           const TrainerParams& params);

// Independent oracle: the grid value with the smallest queue-balance
// residual, higher decoupled throughput breaking ties. Every grid point is
// evaluated on the same batch so the comparison shares its noise. Points
// with no relay activity at all satisfy the balance vacuously and are
// considered only when the entire grid is inactive.
double grid_search_lambda(const SystemConfig& cfg, const SubsetCatalog& catalog,
                          std::span<const double> grid, uint64_t batch_slots,
                          uint64_t seed);

// Columns: iteration,lambda,delta_lambda,step
void write_trace_csv(const TrainerResult& result, std::ostream& out);

}  // namespace marc
