#include <doctest.h>

#include <cmath>
#include <set>

#include "ltfb/simulator.hpp"

using namespace ltfb;

TEST_SUITE("simulator") {
  TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m) {
      for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(m, {i}));
    }
    CHECK(seen.size() == 200);
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  }

  TEST_CASE("trial configuration validation") {
    TrialConfig cfg;
    cfg.channel.ser = 1.0;
    CHECK_THROWS_AS(run_trial(cfg), std::domain_error);
    cfg.channel.ser = 1.5;
    cfg.deadline = 10;
    CHECK_THROWS_AS(run_trial(cfg), std::domain_error);
    cfg.channel.ser = 0.0;
    cfg.policy.kind = FeedbackKind::layer_ack;
    CHECK_THROWS_AS(run_trial(cfg), std::domain_error);
    cfg.policy.kind = FeedbackKind::none;
    cfg.layers = LayerConfig{{10, 10}, {1.0, 1.0}};
    CHECK_THROWS_AS(run_trial(cfg), std::domain_error);
    cfg.layers.reset();
    cfg.schedule = DistributionSchedule::robust_soliton(RsdParams{50, 0.1, 1.0});
    CHECK_THROWS_AS(run_trial(cfg), std::domain_error);
  }

  TEST_CASE("total erasure with a deadline receives nothing") {
    TrialConfig cfg;
    cfg.channel.ser = 1.0;
    cfg.deadline = 200;
    const auto t = run_trial(cfg);
    CHECK(t.sent == 200);
    CHECK(t.received == 0);
    CHECK(t.records.empty());
    CHECK(!t.complete());
    CHECK(t.decoded_layers() == 0);
    CHECK(distortion_of_trace(t, RateDistortionModel::single_layer()) == 1.0);
  }

  TEST_CASE("one-symbol block completes on the first reception") {
    TrialConfig cfg;
    cfg.k = 1;
    const auto t = run_trial(cfg);
    REQUIRE(t.complete());
    CHECK(*t.completion == 1);
    CHECK(*t.overhead() == 0.0);
  }

  TEST_CASE("trace invariants and determinism") {
    for (auto kind : {FeedbackKind::none, FeedbackKind::per_symbol_ack, FeedbackKind::layer_ack}) {
      TrialConfig cfg;
      cfg.k = 300;
      cfg.seed = 12;
      cfg.channel.ser = 0.2;
      cfg.policy.kind = kind;
      if (kind == FeedbackKind::layer_ack) cfg.layers = LayerConfig::two_layer(300, 0.5, 9.0);
      const auto t = run_trial(cfg);
      REQUIRE(t.complete());
      CHECK(*t.overhead() >= 0.0);
      CHECK(t.payload_mismatches == 0);
      CHECK(t.sent >= t.received);
      for (std::size_t r = 1; r < t.records.size(); ++r) {
        CHECK(t.records[r].received == t.records[r - 1].received + 1);
        CHECK(t.records[r].sent > t.records[r - 1].sent);
        for (int g = 0; g < t.layers(); ++g) CHECK(t.undecoded_at(r, g) <= t.undecoded_at(r - 1, g));
      }
      if (kind == FeedbackKind::per_symbol_ack) {
        for (const auto& rec : t.records) CHECK(!rec.redundant());
      }
      const auto again = run_trial(cfg);
      CHECK(again.undecoded == t.undecoded);
      CHECK(again.sent == t.sent);
    }
  }

  TEST_CASE("deadline can count receptions instead of transmissions") {
    TrialConfig cfg;
    cfg.k = 100;
    cfg.channel.ser = 0.5;
    cfg.deadline = 20;
    cfg.deadline_basis = DeadlineBasis::received;
    const auto t = run_trial(cfg);
    CHECK(t.received == 20);
    CHECK(t.sent > 20);
  }

  TEST_CASE("distortion model") {
    const auto single = RateDistortionModel::single_layer();
    CHECK(single.rate(1) == doctest::Approx(0.2170138888888889).epsilon(1e-14));
    CHECK(single.distortion(1) == doctest::Approx(0.740192397133012).epsilon(1e-13));
    CHECK(single.distortion(0) == 1.0);
    const auto two = RateDistortionModel::two_layer(0.5);
    CHECK(two.rate(1) == doctest::Approx(0.10850694444444445).epsilon(1e-14));
    CHECK(two.distortion(1) == doctest::Approx(0.8603443479985279).epsilon(1e-13));
    CHECK(two.distortion(2) == doctest::Approx(0.740192397133012).epsilon(1e-13));
    CHECK_THROWS_AS(two.rate(3), std::domain_error);
    CHECK_THROWS_AS(RateDistortionModel::two_layer(1.5), std::domain_error);
  }

  TEST_CASE("redundancy at a frozen decoder state matches the closed form") {
    const int k = 200;
    const auto rsd = robust_soliton(RsdParams{k, 0.1, 1.0});
    Rng rng(3);
    const auto block = InputBlock::random(k, 1, rng);
    Encoder enc(block, rsd, 4);
    Decoder dec(k, 1);
    while (dec.undecoded() > 120) dec.receive(enc.next());
    const int L = dec.undecoded();
    const int n = 100000;
    int redundant = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = enc.next();
      bool all = true;
      for (auto idx : s.neighbors) all = all && dec.is_decoded(idx);
      redundant += all ? 1 : 0;
    }
    const double p = reduced_degree_dist(rsd, L)[0];
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(double(redundant) / n - p) <= 3 * sigma);
  }

  TEST_CASE("avalanche: decoding happens late and fast") {
    SingleLayerExperiment e;
    e.k = 1000;
    e.runs = 20;
    const auto none = experiment_single_layer(e).front();
    const auto& curve = none.curves[0];
    REQUIRE(curve.size() > 1000);
    CHECK(curve[0] == 1.0);
    CHECK(curve[800] > 0.5);
    CHECK(curve.back() == 0.0);
    std::size_t half = 0;
    while (curve[half] > 0.5) ++half;
    CHECK(half > 950);
    CHECK(half < 1300);
    CHECK(std::isfinite(none.mean_overhead));
    CHECK(none.overheads.size() == 20);
  }

  TEST_CASE("aggregates do not depend on the thread count") {
    SingleLayerExperiment e;
    e.k = 100;
    e.runs = 30;
    e.threads = 1;
    const auto one = experiment_single_layer(e);
    e.threads = 4;
    const auto four = experiment_single_layer(e);
    REQUIRE(one.size() == four.size());
    for (std::size_t s = 0; s < one.size(); ++s) {
      CHECK(one[s].curves == four[s].curves);
      CHECK(one[s].overheads == four[s].overheads);
    }
  }

  TEST_CASE("equal weights split the layers proportionally") {
    TwoLayerExperiment e;
    e.k = 200;
    e.beta = 1.0;
    e.runs = 200;
    e.with_layer_ack = false;
    e.single_layer_baseline = false;
    const auto s = experiment_two_layer(e).front();
    REQUIRE(s.curves.size() == 2);
    for (std::size_t x : {50u, 150u, 220u, 260u}) {
      CHECK(std::abs(s.curves[0][x] - s.curves[1][x]) < 0.05);
    }
    CHECK(s.base_first_fraction < 0.8);
  }

  TEST_CASE("distortion experiment") {
    DistortionExperiment e;
    e.ser_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    e.seconds = 60;
    const auto r = experiment_distortion(e);
    REQUIRE(r.points.size() == 6);
    CHECK(r.schemes == std::vector<std::string>{"single_layer", "two_layer", "two_layer_ack"});
    CHECK(r.payload_mismatches == 0);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(r.points.back().mean[s] == 1.0);
      for (std::size_t p = 1; p < r.points.size(); ++p) {
        const double a = r.points[p - 1].mean[s], b = r.points[p].mean[s];
        const double se = std::hypot(r.points[p - 1].standard_error[s], r.points[p].standard_error[s]);
        CHECK(b >= a - 2 * se - 1e-12);
      }
      for (const auto& p : r.points) {
        CHECK(p.mean[s] >= 0.740192397133012 - 1e-12);
        CHECK(p.mean[s] <= 1.0);
      }
    }
    e.seconds = 0;
    CHECK_THROWS_AS(experiment_distortion(e), std::domain_error);
  }
}
