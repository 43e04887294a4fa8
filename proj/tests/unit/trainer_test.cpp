#include <doctest.h>

#include <cmath>
#include <sstream>

#include "marc/simulator.hpp"
#include "marc/trainer.hpp"

using namespace marc;

namespace {

// Strong relay links, weak direct links, strong backhaul.
SystemConfig relay_friendly() {
  return make_config_db(3, 1, 1, 10.0, {-6, -9, -8, -16, -13, -15, 0});
}

// Relay links 40 dB down: partial decoding is essentially never feasible.
SystemConfig relay_useless() {
  return make_config_db(3, 1, 1, 10.0, {-40, -40, -40, -16, -13, -15, 0});
}

ChannelState make_state(std::vector<double> snr_relay,
                        std::vector<double> snr_base, double snr_rb = 0.0) {
  ChannelState state;
  state.snr_ue_relay = std::move(snr_relay);
  state.snr_ue_base = std::move(snr_base);
  state.snr_relay_base = snr_rb;
  return state;
}

}  // namespace

TEST_CASE("gradient sample per action kind") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const ChannelState state = make_state({7, 0.1, 0.1}, {3, 0.1, 0.1}, 3.0);

  // A winning store on sums (7, 3) contributes C(7) - C(3) = 1.
  const Decision store{{ActionKind::Store, 0}, 0.0, std::nullopt};
  CHECK(gradient_sample(state, catalog, store) == doctest::Approx(1.0));

  // A forward selection contributes minus the unclamped drain.
  const Decision forward{{ActionKind::Forward, 0}, 0.0, std::nullopt};
  CHECK(gradient_sample(state, catalog, forward) ==
        doctest::Approx(-capacity(3.0)));

  const Decision direct{{ActionKind::Direct, 0}, 0.0, std::nullopt};
  CHECK(gradient_sample(state, catalog, direct) == 0.0);

  // At lambda = -0.5 the store above actually wins the slot, so a
  // single-slot batch mean equals its contribution.
  const Decision chosen = select_action(state, catalog, DualVariable{-0.5});
  CHECK(chosen.action.kind == ActionKind::Store);
  CHECK(gradient_sample(state, catalog, chosen) == doctest::Approx(1.0));
}

TEST_CASE("gradient estimate is the mean of per-slot samples") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const DualVariable dual{0.3};
  constexpr uint64_t kBatch = 500;
  constexpr uint64_t kSeed = 314;

  const double estimate = estimate_gradient(dual, cfg, catalog, kBatch, kSeed);

  const ChannelSampler sampler(cfg, kSeed);
  double total = 0.0;
  for (uint64_t slot = 0; slot < kBatch; ++slot) {
    const ChannelState state = sampler.sample(slot);
    total += gradient_sample(state, catalog, select_action(state, catalog, dual));
  }
  CHECK(estimate == doctest::Approx(total / kBatch).epsilon(1e-12));
}

TEST_CASE("gradient sign semantics") {
  SUBCASE("no feasible store means no arrivals") {
    const SystemConfig cfg = relay_useless();
    const SubsetCatalog catalog = enumerate_subsets(cfg);
    const BatchStats stats = evaluate_decoupled_batch(
        cfg, catalog, DualVariable{0.0}, 20000, 9);
    CHECK(stats.arrival_rate == 0.0);
    CHECK(estimate_gradient(DualVariable{0.0}, cfg, catalog, 20000, 9) <= 0.0);
  }
  SUBCASE("huge lambda suppresses store selections") {
    const SystemConfig cfg = relay_friendly();
    const SubsetCatalog catalog = enumerate_subsets(cfg);
    const BatchStats stats = evaluate_decoupled_batch(
        cfg, catalog, DualVariable{1000.0}, 20000, 10);
    CHECK(stats.arrival_rate == 0.0);
    CHECK(estimate_gradient(DualVariable{1000.0}, cfg, catalog, 20000, 10) <=
          0.0);
  }
}

TEST_CASE("training is deterministic") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 5000;
  params.max_iters = 40;
  params.seed = 7;
  const TrainerResult a = train_lambda(cfg, catalog, params);
  const TrainerResult b = train_lambda(cfg, catalog, params);
  CHECK(a.lambda_star == b.lambda_star);
  CHECK(a.iterations == b.iterations);
  CHECK(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].lambda == b.trace[i].lambda);
    CHECK(a.trace[i].delta_lambda == b.trace[i].delta_lambda);
  }
}

TEST_CASE("trained multiplier is stable under a halved step") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 30000;
  params.max_iters = 200;
  params.seed = 17;
  const TrainerResult full = train_lambda(cfg, catalog, params);
  params.step0 /= 2;
  const TrainerResult halved = train_lambda(cfg, catalog, params);
  CHECK(std::abs(full.lambda_star - halved.lambda_star) <= 0.05);
}

TEST_CASE("relay-useless system converges to direct transmission") {
  const SystemConfig cfg = relay_useless();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 10000;
  params.seed = 23;
  const TrainerResult result = train_lambda(cfg, catalog, params);
  const SimulationReport report = run_simulation(
      cfg, catalog, DualVariable{result.lambda_star}, 100000, 1001);
  CHECK(static_cast<double>(report.action_counts.direct) >=
        0.99 * static_cast<double>(report.slots));
}

TEST_CASE("overwhelming departures drive lambda into the direct-only regime") {
  // No feasible store ever (relay links 40 dB down) but an enormous backhaul:
  // the balance gradient is strongly negative until lambda crosses -1.
  const SystemConfig cfg =
      make_config_db(3, 1, 1, 10.0, {-40, -40, -40, -60, -60, -60, 60});
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 2000;
  params.seed = 3;
  const TrainerResult result = train_lambda(cfg, catalog, params);
  CHECK(result.direct_only);
  CHECK(result.converged);
  CHECK(result.lambda_star <= kDirectOnlyLambda);
}

TEST_CASE("estimator noise shrinks like one over sqrt(batch)") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const DualVariable dual{0.3};
  constexpr int kReps = 256;
  auto stddev = [&](uint64_t batch, uint64_t salt) {
    double sum = 0.0, sq = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
      const double g = estimate_gradient(
          dual, cfg, catalog, batch,
          rng::derive_seed(salt, static_cast<uint64_t>(rep)));
      sum += g;
      sq += g * g;
    }
    const double mean = sum / kReps;
    return std::sqrt(sq / kReps - mean * mean);
  };
  const double coarse = stddev(512, 1111);
  const double fine = stddev(1024, 2222);
  CHECK(coarse / fine == doctest::Approx(std::sqrt(2.0)).epsilon(0.20));
}

TEST_CASE("grid search") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);

  SUBCASE("singleton grid returns its only value") {
    const std::vector<double> grid{0.7};
    CHECK(grid_search_lambda(cfg, catalog, grid, 2000, 5) == 0.7);
  }
  SUBCASE("agrees with the gradient trainer") {
    TrainerParams params;
    params.batch_slots = 30000;
    params.seed = 29;
    const TrainerResult trained = train_lambda(cfg, catalog, params);
    std::vector<double> grid;
    for (double v = -1.0; v <= 5.0 + 1e-9; v += 0.05) grid.push_back(v);
    const double from_grid =
        grid_search_lambda(cfg, catalog, grid, 30000, 29);
    CHECK(std::abs(from_grid - trained.lambda_star) <= 0.2);
  }
  SUBCASE("a fully inactive relay yields the direct-only decision sequence") {
    // Both relay sides dead: no grid point ever uses the relay, so the
    // returned multiplier must reproduce the direct-only selections.
    const SystemConfig dead =
        make_config_db(3, 1, 1, 10.0, {-60, -60, -60, -16, -13, -15, -60});
    const SubsetCatalog dead_catalog = enumerate_subsets(dead);
    const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    const double lambda = grid_search_lambda(dead, dead_catalog, grid, 4000, 31);
    const ChannelSampler sampler(dead, 8);
    for (uint64_t slot = 0; slot < 500; ++slot) {
      const ChannelState state = sampler.sample(slot);
      const Decision chosen =
          select_action(state, dead_catalog, DualVariable{lambda});
      const Decision direct = select_direct_only(state, dead_catalog);
      CHECK(chosen.action == direct.action);
    }
  }
}

TEST_CASE("dual objective matches the clamped throughput at equilibrium") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 50000;
  params.seed = 97;
  const TrainerResult trained = train_lambda(cfg, catalog, params);
  const DualVariable dual{trained.lambda_star};
  const BatchStats stats =
      evaluate_decoupled_batch(cfg, catalog, dual, 200000, 4242);
  const double value = dual_objective(stats, dual);
  const SimulationReport report =
      run_simulation(cfg, catalog, dual, 200000, 777);
  CHECK(std::abs(value - report.tau_bar) / report.tau_bar < 0.02);
}

TEST_CASE("trace export") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 1000;
  params.max_iters = 15;
  params.tol = 1e-12;  // force the full iteration budget
  const TrainerResult result = train_lambda(cfg, catalog, params);
  CHECK(result.iterations == 15);
  CHECK_FALSE(result.converged);

  std::ostringstream out;
  write_trace_csv(result, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,lambda,delta_lambda,step");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == result.iterations);
  CHECK(result.trace.front().lambda == params.lambda_init);
}

TEST_CASE("step schedules") {
  CHECK(step_schedule_from_string("constant") == StepSchedule::Constant);
  CHECK(step_schedule_from_string("inverse") == StepSchedule::Inverse);
  CHECK(step_schedule_from_string("inverse_sqrt") == StepSchedule::InverseSqrt);
  CHECK_THROWS_AS(step_schedule_from_string("bogus"), ConfigError);

  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 500;
  params.max_iters = 4;
  params.tol = 1e-12;
  params.schedule = StepSchedule::Constant;
  const TrainerResult constant = train_lambda(cfg, catalog, params);
  for (const TraceEntry& entry : constant.trace) {
    CHECK(entry.step == doctest::Approx(params.step0));
  }
  params.schedule = StepSchedule::InverseSqrt;
  const TrainerResult inv_sqrt = train_lambda(cfg, catalog, params);
  CHECK(inv_sqrt.trace[3].step ==
        doctest::Approx(params.step0 / std::sqrt(4.0)));
}
