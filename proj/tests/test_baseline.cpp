#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "linkrl/baseline.hpp"
#include "linkrl/common.hpp"
#include "linkrl/env.hpp"
#include "linkrl/mcs.hpp"
#include "linkrl/policy.hpp"

using namespace linkrl;

TEST_CASE("zero-drift fixed point ties the step sizes") {
  const auto s = baseline::OllaState::make(0.1, 1.0);
  CHECK(s.step_down_db == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  CHECK(std::abs(s.step_down_db - s.step_up_db * s.target_bler / (1.0 - s.target_bler)) < 1e-9);
  const auto d = baseline::OllaState::make(0.05, 0.5);
  CHECK(d.step_down_db == doctest::Approx(0.5 * 0.05 / 0.95).epsilon(1e-9));
}

TEST_CASE("illa_select clamps and is monotone in the offset") {
  linksim::BlerModel bm;
  CHECK(baseline::illa_select(-100.0, 0.0, 0.1, bm) == 0);
  CHECK(baseline::illa_select(100.0, 0.0, 0.1, bm) == 27);
  int last = 27;
  for (double off = -10; off <= 10; off += 0.25) {
    const int m = baseline::illa_select(15.0, off, 0.1, bm);
    CHECK(m <= last);  // larger offset never raises the selection
    last = m;
  }
}

TEST_CASE("illa at zero offset reproduces the CQI representative MCS") {
  linksim::BlerModel bm;
  for (int c = 0; c <= 15; ++c) {
    const double sinr = linksim::cqi_representative_sinr_db(c, bm.slope_per_db, bm.gap_db);
    CHECK(baseline::illa_select(sinr, 0.0, 0.1, bm) == linksim::cqi_representative_mcs(c));
  }
}

TEST_CASE("olla_update steps and clamps") {
  auto s = baseline::OllaState::make(0.1, 1.0);
  s = baseline::olla_update(s, false);  // NACK
  CHECK(s.offset_db == doctest::Approx(1.0).epsilon(1e-12));
  s = baseline::olla_update(s, true);  // ACK
  CHECK(s.offset_db == doctest::Approx(1.0 - 1.0 / 9.0).epsilon(1e-12));

  SUBCASE("one ACK then one NACK nets step_up - step_down") {
    auto t = baseline::OllaState::make(0.1, 0.5);
    t = baseline::olla_update(t, true);
    t = baseline::olla_update(t, false);
    CHECK(t.offset_db == doctest::Approx(0.5 - 0.5 / 9.0).epsilon(1e-12));
  }

  SUBCASE("offset never escapes the clamp") {
    auto t = baseline::OllaState::make(0.1, 1.0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100000; ++i) {
      t = baseline::olla_update(t, uniform01(rng) < 0.5);
      CHECK(t.offset_db <= baseline::kOllaOffsetClampDb);
      CHECK(t.offset_db >= -baseline::kOllaOffsetClampDb);
    }
    for (int i = 0; i < 50; ++i) t = baseline::olla_update(t, false);
    CHECK(t.offset_db == baseline::kOllaOffsetClampDb);
  }
}

TEST_CASE("offset drift vanishes when BLER sits at the target") {
  // mean per-update offset change, away from the clamp
  auto s = baseline::OllaState::make(0.1, 0.5);
  std::mt19937_64 rng(17);
  double drift_sum = 0;
  long counted = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double before = s.offset_db;
    s = baseline::olla_update(s, uniform01(rng) >= 0.1);  // ACK with prob 0.9
    if (std::abs(before) < baseline::kOllaOffsetClampDb - 1.0) {
      drift_sum += s.offset_db - before;
      counted += 1;
    }
  }
  REQUIRE(counted > 1000);
  CHECK(std::abs(drift_sum / counted) < 0.1);
}

TEST_CASE("ILLA+OLLA converges to the target BLER on a stationary channel") {
  // first-transmission BLER over the tail of a long run
  linksim::ScenarioConfig cfg;
  cfg.mean_sinr_db = 14.0;
  cfg.fading_sigma_db = 6.0;
  cfg.fading_rho = 0.7165;
  cfg.seed = 2024;
  env::LinkAdaptEnv e(cfg);
  evalkit::OllaPolicy policy;
  policy.begin_run();

  long first_tx = 0, first_nack = 0;
  const long total_packets = 20000, warmup = 10000;
  for (long p = 0; p < total_packets; ++p) {
    auto s = e.reset();
    while (true) {
      const int a = policy.act(s);
      auto [next, info] = e.step(a);
      policy.on_feedback(info.success, info.attempt == 0);
      if (info.attempt == 0 && p >= warmup) {
        first_tx += 1;
        if (!info.success) first_nack += 1;
      }
      if (info.done) break;
      s = *next;
    }
  }
  const double bler = static_cast<double>(first_nack) / static_cast<double>(first_tx);
  CHECK(bler == doctest::Approx(0.1).epsilon(0.3));  // 0.1 +/- 0.03
}
