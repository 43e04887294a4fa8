#include "marc/trainer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace marc {

const char* to_string(StepSchedule schedule) {
  switch (schedule) {
    case StepSchedule::Constant:
      return "constant";
    case StepSchedule::Inverse:
      return "inverse";
    case StepSchedule::InverseSqrt:
      return "inverse_sqrt";
  }
  return "?";
}

StepSchedule step_schedule_from_string(const std::string& name) {
  if (name == "constant") return StepSchedule::Constant;
  if (name == "inverse") return StepSchedule::Inverse;
  if (name == "inverse_sqrt") return StepSchedule::InverseSqrt;
  throw ConfigError("unknown step_schedule '" + name +
                    "' (expected constant, inverse or inverse_sqrt)");
}

namespace {

double step_size(const TrainerParams& params, int s) {
  switch (params.schedule) {
    case StepSchedule::Constant:
      return params.step0;
    case StepSchedule::Inverse:
      return params.step0 / (1.0 + s);
    case StepSchedule::InverseSqrt:
      return params.step0 / std::sqrt(1.0 + s);
  }
  return params.step0;
}

}  // namespace

double gradient_sample(const ChannelState& state, const SubsetCatalog& catalog,
                       const Decision& decision) {
  switch (decision.action.kind) {
    case ActionKind::Store: {
      const auto& subset = catalog.store_subsets[static_cast<size_t>(
          decision.action.subset_index)];
      return store_rates(state, subset, decision.action.subset_index)
          .relay_rate;
    }
    case ActionKind::Forward: {
      const auto& subset = catalog.forward_subsets[static_cast<size_t>(
          decision.action.subset_index)];
      return -forward_rates(state, subset, decision.action.subset_index,
                            BufferState{}, /*decouple=*/true)
                  .relay_rate;
    }
    case ActionKind::Direct:
      return 0.0;
  }
  return 0.0;
}

BatchStats evaluate_decoupled_batch(const SystemConfig& cfg,
                                    const SubsetCatalog& catalog,
                                    DualVariable dual, uint64_t batch_slots,
                                    uint64_t seed) {
  if (batch_slots == 0) {
    throw std::invalid_argument(
        "evaluate_decoupled_batch: batch must be >= 1");
  }
  ChannelSampler sampler(cfg, seed);
  ChannelState state;
  double arrivals = 0.0;
  double departures = 0.0;
  double delivered = 0.0;
  for (uint64_t slot = 0; slot < batch_slots; ++slot) {
    sampler.sample_into(slot, state);
    const Decision decision = select_action(state, catalog, dual);
    const int index = decision.action.subset_index;
    switch (decision.action.kind) {
      case ActionKind::Direct: {
        const auto& subset =
            catalog.direct_subsets[static_cast<size_t>(index)];
        delivered += direct_rate(state, subset, index).sum_rate_direct;
        break;
      }
      case ActionKind::Store: {
        const auto& subset = catalog.store_subsets[static_cast<size_t>(index)];
        const ActionRates rates = store_rates(state, subset, index);
        delivered += rates.sum_rate_direct;
        arrivals += rates.relay_rate;
        break;
      }
      case ActionKind::Forward: {
        const auto& subset =
            catalog.forward_subsets[static_cast<size_t>(index)];
        const ActionRates rates = forward_rates(state, subset, index,
                                                BufferState{},
                                                /*decouple=*/true);
        delivered += rates.sum_rate_direct + rates.relay_rate;
        departures += rates.relay_rate;
        break;
      }
    }
  }
  const double n = static_cast<double>(batch_slots);
  return BatchStats{arrivals / n, departures / n, delivered / n};
}

double estimate_gradient(DualVariable dual, const SystemConfig& cfg,
                         const SubsetCatalog& catalog, uint64_t batch_slots,
                         uint64_t seed) {
  const BatchStats stats =
      evaluate_decoupled_batch(cfg, catalog, dual, batch_slots, seed);
  return stats.arrival_rate - stats.departure_rate;
}

TrainerResult train_lambda(const SystemConfig& cfg,
                           const SubsetCatalog& catalog,
                           const TrainerParams& params) {
  TrainerResult result;
  result.trace.reserve(static_cast<size_t>(params.max_iters));
  // Updates that cross the direct-only threshold land here instead, unless
  // the balance gradient still points outward at the boundary itself.
  const double boundary = kDirectOnlyLambda + 1e-3;
  double lambda = params.lambda_init;
  for (int s = 0; s < params.max_iters; ++s) {
    // Fresh batch each iteration keeps the gradient estimates unbiased.
    const uint64_t batch_seed =
        rng::derive_seed(params.seed, static_cast<uint64_t>(s) + 1);
    const double gradient =
        estimate_gradient(DualVariable{lambda}, cfg, catalog,
                          params.batch_slots, batch_seed);
    const double step = step_size(params, s);
    result.trace.push_back({s, lambda, gradient, step});
    double next = lambda + step * gradient;
    result.iterations = s + 1;
    result.residual = std::abs(gradient);
    if (next <= kDirectOnlyLambda) {
      // An early large step can overshoot the threshold even when the
      // equilibrium is interior. Only classify as direct-only if departures
      // still dominate arrivals right at the boundary; otherwise project
      // back and keep iterating.
      const double boundary_gradient = estimate_gradient(
          DualVariable{boundary}, cfg, catalog, params.batch_slots,
          rng::derive_seed(params.seed, 0x70000000ULL + static_cast<uint64_t>(s)));
      if (boundary_gradient <= 0.0) {
        result.direct_only = true;
        result.converged = true;
        lambda = next;
        break;
      }
      next = boundary;
    }
    lambda = next;
    if (result.residual <= params.tol) {
      result.converged = true;
      break;
    }
  }
  result.lambda_star = lambda;
  return result;
}

double grid_search_lambda(const SystemConfig& cfg, const SubsetCatalog& catalog,
                          std::span<const double> grid, uint64_t batch_slots,
                          uint64_t seed) {
  if (grid.empty()) {
    throw std::invalid_argument("grid_search_lambda: empty grid");
  }
  // Points where the relay never acts (no arrivals, no departures) satisfy
  // the balance vacuously: at and below the direct-only threshold the
  // residual is exactly zero with the buffer idle. Such points only compete
  // when the whole grid is vacuous, i.e. the system genuinely never relays.
  double best_lambda = grid.front();
  double best_residual = 0.0;
  double best_throughput = 0.0;
  bool have_active = false;
  for (double lambda : grid) {
    const BatchStats stats = evaluate_decoupled_batch(
        cfg, catalog, DualVariable{lambda}, batch_slots, seed);
    const bool active = stats.arrival_rate > 0.0 || stats.departure_rate > 0.0;
    if (!active) continue;
    const double residual = std::abs(stats.arrival_rate - stats.departure_rate);
    if (!have_active || residual < best_residual ||
        (residual == best_residual && stats.throughput > best_throughput)) {
      best_lambda = lambda;
      best_residual = residual;
      best_throughput = stats.throughput;
      have_active = true;
    }
  }
  return have_active ? best_lambda : grid.front();
}

void write_trace_csv(const TrainerResult& result, std::ostream& out) {
  out << "iteration,lambda,delta_lambda,step\n";
  for (const TraceEntry& entry : result.trace) {
    out << entry.iteration << ',' << entry.lambda << ',' << entry.delta_lambda
        << ',' << entry.step << '\n';
  }
}

}  // namespace marc
