#include <doctest.h>

#include <cmath>

#include "marc/simulator.hpp"
#include "marc/trainer.hpp"

using namespace marc;

namespace {

SystemConfig relay_friendly() {
  return make_config_db(3, 1, 1, 10.0, {-6, -9, -8, -16, -13, -15, 0});
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

TEST_CASE("apply_action per kind") {
  // Base access limit 2 so forward subsets are singletons.
  SystemConfig cfg = relay_friendly();
  cfg.base_access_limit = 2;
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const ChannelState state = make_state({7, 1, 1}, {3, 0.5, 0.5}, 3.0);

  SUBCASE("direct leaves the buffer untouched") {
    BufferState buffer{5.0};
    const Decision decision{{ActionKind::Direct, 0}, 0.0, std::nullopt};
    const SlotOutcome outcome = apply_action(state, catalog, decision, buffer);
    CHECK(outcome.buffer_after == 5.0);
    CHECK(outcome.arrival == 0.0);
    CHECK(outcome.departure == 0.0);
    // Direct subset 0 is {u1, u2}: C(3 + 0.5).
    CHECK(outcome.delivered_bits == doctest::Approx(capacity(3.5)));
    CHECK(buffer.bits == 5.0);
  }
  SUBCASE("store pushes the relay-decoded remainder") {
    BufferState buffer{1.0};
    const Decision decision{{ActionKind::Store, 0}, 0.0, std::nullopt};
    const SlotOutcome outcome = apply_action(state, catalog, decision, buffer);
    CHECK(outcome.arrival == doctest::Approx(1.0));
    CHECK(outcome.buffer_after == doctest::Approx(2.0));
    CHECK(outcome.delivered_bits == doctest::Approx(2.0));
    CHECK(buffer.bits == doctest::Approx(2.0));
  }
  SUBCASE("forward on an empty buffer delivers only the direct part") {
    BufferState buffer{0.0};
    const Decision decision{{ActionKind::Forward, 0}, 0.0, std::nullopt};
    const SlotOutcome outcome = apply_action(state, catalog, decision, buffer);
    CHECK(outcome.departure == 0.0);
    CHECK(outcome.delivered_bits == doctest::Approx(capacity(3.0)));
    CHECK(outcome.buffer_after == 0.0);
  }
  SUBCASE("forward drain is clipped at the buffer level") {
    BufferState buffer{0.25};
    const Decision decision{{ActionKind::Forward, 0}, 0.0, std::nullopt};
    const SlotOutcome outcome = apply_action(state, catalog, decision, buffer);
    CHECK(outcome.departure == doctest::Approx(0.25));
    CHECK(outcome.buffer_after == 0.0);
  }
}

TEST_CASE("slot accounting holds exactly along a long run") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  KahanSum arrivals, departures;
  double min_buffer = 0.0;
  uint64_t sink_calls = 0;
  const SlotSink sink = [&](const SlotOutcome& outcome) {
    ++sink_calls;
    arrivals.add(outcome.arrival);
    departures.add(outcome.departure);
    min_buffer = std::min(min_buffer, outcome.buffer_after);
    // Per-slot update identity, exact in double arithmetic.
    if (outcome.arrival > 0.0) {
      CHECK(outcome.buffer_before + outcome.arrival == outcome.buffer_after);
    } else {
      CHECK(outcome.buffer_before - outcome.departure == outcome.buffer_after);
    }
  };
  // Near the balanced multiplier all three action kinds occur.
  const SimulationReport report =
      run_simulation(cfg, catalog, DualVariable{-0.7}, 100000, 5, sink);
  CHECK(sink_calls == report.slots);
  CHECK(min_buffer >= 0.0);
  CHECK(std::abs(arrivals.value() - departures.value() -
                 report.final_buffer) <= 1e-9);
  CHECK(report.arrival_rate ==
        doctest::Approx(arrivals.value() / 100000).epsilon(1e-12));
  // All three kinds should actually occur in this scenario.
  CHECK(report.action_counts.direct > 0);
  CHECK(report.action_counts.store > 0);
  CHECK(report.action_counts.forward > 0);
  CHECK(report.action_counts.direct + report.action_counts.store +
            report.action_counts.forward ==
        report.slots);
}

TEST_CASE("throughput decomposes by action kind") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const SimulationReport report =
      run_simulation(cfg, catalog, DualVariable{0.4}, 50000, 8);
  CHECK(report.tau_direct >= 0.0);
  CHECK(report.tau_store >= 0.0);
  CHECK(report.tau_forward >= 0.0);
  CHECK(report.tau_direct + report.tau_store + report.tau_forward ==
        doctest::Approx(report.tau_bar).epsilon(1e-12));
  CHECK(report.tau_se > 0.0);
  CHECK(report.buffer_peak >= report.final_buffer);
}

TEST_CASE("delivered bits replay from the stored channel state") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  std::vector<SlotOutcome> sampled;
  const SlotSink sink = [&](const SlotOutcome& outcome) {
    if (outcome.slot % 997 == 0) sampled.push_back(outcome);
  };
  run_simulation(cfg, catalog, DualVariable{0.4}, 50000, 12, sink);
  REQUIRE(!sampled.empty());

  const ChannelSampler sampler(cfg, 12);
  const DualVariable dual{0.4};
  for (const SlotOutcome& outcome : sampled) {
    const ChannelState state = sampler.sample(outcome.slot);
    const Decision decision = select_action(state, catalog, dual);
    CHECK(decision.action == outcome.action);
    BufferState buffer{outcome.buffer_before};
    const SlotOutcome replayed = apply_action(state, catalog, decision, buffer);
    CHECK(replayed.delivered_bits == outcome.delivered_bits);
    CHECK(replayed.arrival == outcome.arrival);
    CHECK(replayed.departure == outcome.departure);
    CHECK(replayed.buffer_after == outcome.buffer_after);
  }
}

TEST_CASE("zero-slot runs are rejected") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  CHECK_THROWS_AS(run_simulation(cfg, catalog, DualVariable{0.0}, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_paired(cfg, catalog, DualVariable{0.0}, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      evaluate_decoupled_batch(cfg, catalog, DualVariable{0.0}, 0, 1),
      std::invalid_argument);
}

TEST_CASE("runs are deterministic") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const SimulationReport a =
      run_simulation(cfg, catalog, DualVariable{0.7}, 20000, 99);
  const SimulationReport b =
      run_simulation(cfg, catalog, DualVariable{0.7}, 20000, 99);
  CHECK(a.tau_bar == b.tau_bar);
  CHECK(a.arrival_rate == b.arrival_rate);
  CHECK(a.departure_rate == b.departure_rate);
  CHECK(a.final_buffer == b.final_buffer);
  CHECK(a.buffer_peak == b.buffer_peak);
  CHECK(a.action_counts.per_store_subset == b.action_counts.per_store_subset);
}

TEST_CASE("single relay-useless slot") {
  // Both relay sides dead: direct transmission wins immediately.
  const SystemConfig cfg =
      make_config_db(3, 1, 1, 10.0, {-40, -40, -40, -16, -13, -15, -40});
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const SimulationReport report =
      run_simulation(cfg, catalog, DualVariable{0.0}, 1, 3);
  CHECK(report.action_counts.direct == 1);
  CHECK(report.action_counts.store == 0);
  CHECK(report.final_buffer == 0.0);
}

TEST_CASE("direct baseline never touches the buffer") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const SimulationReport report =
      run_direct_baseline(cfg, catalog, 20000, 42);
  CHECK(report.final_buffer == 0.0);
  CHECK(report.buffer_peak == 0.0);
  CHECK(report.action_counts.direct == report.slots);
  CHECK(report.arrival_rate == 0.0);
  CHECK(report.departure_rate == 0.0);

  SUBCASE("shares the channel trace with the adaptive run") {
    // Same seed: the baseline's per-slot delivered bits must equal the best
    // direct metric of the very states the adaptive run saw.
    const ChannelSampler sampler(cfg, 42);
    std::vector<double> delivered;
    const SlotSink sink = [&](const SlotOutcome& outcome) {
      if (outcome.slot < 100) delivered.push_back(outcome.delivered_bits);
    };
    run_direct_baseline(cfg, catalog, 100, 42, sink);
    for (uint64_t slot = 0; slot < 100; ++slot) {
      const Decision best = select_direct_only(sampler.sample(slot), catalog);
      CHECK(delivered[slot] == best.metric_value);
    }
  }
}

TEST_CASE("paired run equals the two standalone runs") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  const DualVariable dual{0.5};
  const PairedReport paired = run_paired(cfg, catalog, dual, 20000, 7);
  const SimulationReport adaptive =
      run_simulation(cfg, catalog, dual, 20000, 7);
  const SimulationReport direct = run_direct_baseline(cfg, catalog, 20000, 7);
  CHECK(paired.adaptive.tau_bar == adaptive.tau_bar);
  CHECK(paired.adaptive.final_buffer == adaptive.final_buffer);
  CHECK(paired.direct.tau_bar == direct.tau_bar);
  CHECK(paired.diff_mean ==
        doctest::Approx(adaptive.tau_bar - direct.tau_bar).epsilon(1e-9));
  CHECK(paired.diff_se >= 0.0);
}

TEST_CASE("buffer grows sublinearly at the trained multiplier") {
  const SystemConfig cfg = relay_friendly();
  const SubsetCatalog catalog = enumerate_subsets(cfg);
  TrainerParams params;
  params.batch_slots = 30000;
  params.seed = 61;
  const TrainerResult trained = train_lambda(cfg, catalog, params);
  const DualVariable dual{trained.lambda_star};
  const SimulationReport short_run =
      run_simulation(cfg, catalog, dual, 100000, 77);
  const SimulationReport long_run =
      run_simulation(cfg, catalog, dual, 1000000, 77);
  const double short_ratio = short_run.final_buffer / 100000.0;
  const double long_ratio = long_run.final_buffer / 1000000.0;
  CHECK(long_ratio <= short_ratio + 1e-12);
  CHECK(long_ratio < 0.02);
}
