#include <doctest.h>

#include <cmath>

#include "ltfb/codec.hpp"
#include "ltfb/layered.hpp"

using namespace ltfb;

TEST_SUITE("layered") {
  TEST_CASE("layer configuration") {
    const auto two = LayerConfig::two_layer(100, 0.5, 9.0);
    CHECK(two.layer_sizes == std::vector<int>{50, 50});
    CHECK(two.offset(1) == 50);
    const auto p = two.selection_probabilities();
    CHECK(p[0] * 50 + p[1] * 50 == doctest::Approx(1.0));
    CHECK(p[0] / p[1] == doctest::Approx(9.0));
    CHECK_THROWS_AS(LayerConfig::two_layer(100, 0.0, 9.0), std::domain_error);
    CHECK_THROWS_AS(LayerConfig::two_layer(100, 1.0, 9.0), std::domain_error);
    CHECK_THROWS_AS(LayerConfig::two_layer(100, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(LayerConfig::two_layer(100, 0.001, 9.0), std::domain_error);  // empty base layer
  }

  TEST_CASE("nothing decoded means no redundant symbol") {
    const auto d = robust_soliton(RsdParams{100, 0.1, 1.0});
    const TwoLayerAnalyzer a(d, LayerConfig::two_layer(100, 0.5, 9.0));
    CHECK(a.redundancy(50, 50) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(a.redundancy(0, 0) == doctest::Approx(1.0));
    const auto full = a.reduced(50, 50);
    CHECK(full.at(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("equal weights collapse to the single-layer result") {
    const auto d = robust_soliton(RsdParams{80, 0.1, 1.0});
    const TwoLayerAnalyzer a(d, LayerConfig::two_layer(80, 0.25, 1.0));
    for (auto [lb, lr] : {std::pair{20, 60}, {10, 30}, {0, 15}, {20, 0}, {5, 5}}) {
      const auto marginal = a.reduced(lb, lr).total_degree_marginal(80);
      const auto single = reduced_degree_dist(d, lb + lr);
      for (int i = 0; i <= lb + lr; ++i) CHECK(marginal[static_cast<std::size_t>(i)] == doctest::Approx(single[i]).epsilon(1e-10).scale(1e-12));
    }
  }

  TEST_CASE("joint pmf sums to one and redundancy agrees with the table") {
    const auto d = robust_soliton(RsdParams{60, 0.1, 1.0});
    const TwoLayerAnalyzer a(d, LayerConfig::two_layer(60, 0.4, 5.0));
    for (auto [lb, lr] : {std::pair{24, 36}, {10, 3}, {0, 20}}) {
      const auto r = a.reduced(lb, lr);
      double sum = 0.0;
      for (double v : r.pmf) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(a.redundancy(lb, lr) == doctest::Approx(r.at(0, 0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(a.reduced(25, 0), std::domain_error);
    CHECK_THROWS_AS(a.reduced(0, -1), std::domain_error);
  }

  TEST_CASE("split table is the Wallenius law") {
    const auto d = robust_soliton(RsdParams{40, 0.1, 1.0});
    const TwoLayerAnalyzer a(d, LayerConfig::two_layer(40, 0.5, 3.0));
    for (int i : {1, 4, 11}) {
      double sum = 0.0;
      for (int j = 0; j <= i; ++j) {
        CHECK(a.split(i, j) == doctest::Approx(wallenius_pmf(j, 20, 20, i, 3.0)).epsilon(1e-12));
        sum += a.split(i, j);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("general form with two layers matches the two-layer form") {
    const auto d = robust_soliton(RsdParams{50, 0.1, 1.0});
    const auto layers = LayerConfig::two_layer(50, 0.3, 4.0);
    const std::vector<int> u{7, 21};
    const auto general = n_layer_reduced_dist(d, layers, u);
    const auto two = two_layer_reduced_dist(d, layers, 7, 21);
    for (int b = 0; b <= 7; ++b) {
      for (int r = 0; r <= 21; ++r) {
        const std::vector<int> at{b, r};
        CHECK(general.at(at) == doctest::Approx(two.at(b, r)).epsilon(1e-10).scale(1e-12));
      }
    }
  }

  TEST_CASE("three equal-weight layers reduce to the single-layer result") {
    const auto d = robust_soliton(RsdParams{30, 0.1, 1.0});
    const LayerConfig layers{{10, 8, 12}, {1.0, 1.0, 1.0}};
    const std::vector<int> u{4, 8, 3};
    const auto joint = n_layer_reduced_dist(d, layers, u);
    const auto marginal = joint.total_degree_marginal(30);
    const auto single = reduced_degree_dist(d, 15);
    for (int i = 0; i <= 15; ++i) CHECK(marginal[static_cast<std::size_t>(i)] == doctest::Approx(single[i]).epsilon(1e-10).scale(1e-12));
    for (std::size_t f = 0; f < joint.pmf.size(); ++f) CHECK(joint.flat_index(joint.unflatten(f)) == f);
  }

  TEST_CASE("general form validation") {
    const auto d = robust_soliton(RsdParams{30, 0.1, 1.0});
    const LayerConfig layers{{10, 20}, {2.0, 1.0}};
    const std::vector<int> wrong_len{1};
    const std::vector<int> too_many{11, 0};
    CHECK_THROWS_AS(n_layer_reduced_dist(d, layers, wrong_len), std::domain_error);
    CHECK_THROWS_AS(n_layer_reduced_dist(d, layers, too_many), std::domain_error);
    const LayerConfig short_layers{{10, 10}, {2.0, 1.0}};
    const std::vector<int> u{1, 1};
    CHECK_THROWS_AS(n_layer_reduced_dist(d, short_layers, u), std::domain_error);
  }

  TEST_CASE("redundancy grid agrees with encoder sampling") {
    const int k = 100;
    const auto d = robust_soliton(RsdParams{k, 0.1, 1.0});
    const auto layers = LayerConfig::two_layer(k, 0.5, 9.0);
    const TwoLayerAnalyzer a(d, layers);
    Rng data_rng(1);
    const auto block = InputBlock::random(k, 1, data_rng, layers);
    Encoder enc(block, d, 99);
    const int n = 60000;
    for (auto [lb, lr] : {std::pair{5, 40}, {30, 30}, {50, 10}}) {
      int redundant = 0;
      for (int s = 0; s < n; ++s) {
        const auto sym = enc.next();
        bool any = false;
        for (auto idx : sym.neighbors) {
          const int i = static_cast<int>(idx);
          any = any || i < lb || (i >= 50 && i < 50 + lr);
        }
        redundant += any ? 0 : 1;
      }
      const double p = a.redundancy(lb, lr);
      const double sigma = std::sqrt(p * (1.0 - p) / n);
      CHECK(std::abs(double(redundant) / n - p) <= 3.0 * sigma + 1e-12);
    }
  }
}
