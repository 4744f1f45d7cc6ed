#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "ltfb/combinatorics.hpp"
#include "support/oracles.hpp"

using namespace ltfb;

namespace {

double exact_log_binomial(int n, int r) {
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_int;
  cpp_int num = 1;
  for (int i = 0; i < r; ++i) num = num * (n - i) / (i + 1);
  return static_cast<double>(log(cpp_bin_float_50(num)));
}

}  // namespace

TEST_SUITE("combinatorics") {
  TEST_CASE("log factorial at small and large arguments") {
    CHECK(log_factorial(0) == 0.0L);
    CHECK(log_factorial(1) == 0.0L);
    CHECK(static_cast<double>(log_factorial(5)) == doctest::Approx(std::log(120.0)).epsilon(1e-15));
    // Beyond the table the lgamma path is used.
    CHECK(static_cast<double>(log_factorial(100000)) ==
          doctest::Approx(std::lgamma(100001.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
  }

  TEST_CASE("log binomial matches 50-digit arithmetic") {
    for (int n : {1, 7, 40, 100, 333, 1000, 2500}) {
      for (int r : {0, 1, n / 3, n / 2, n - 1, n}) {
        const double want = exact_log_binomial(n, r);
        CHECK(log_binomial(n, r) == doctest::Approx(want).epsilon(1e-13).scale(1.0));
      }
    }
    CHECK(log_binomial(10, 11) == -std::numeric_limits<double>::infinity());
    CHECK(log_binomial(10, -1) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(log_binomial(-1, 0), std::domain_error);
  }

  TEST_CASE("hypergeometric pmf") {
    CHECK(hypergeom_pmf(2, 6, 3, 3) == doctest::Approx(9.0 / 20.0).epsilon(1e-14));
    double total = 0.0;
    for (int x = 0; x <= 30; ++x) total += hypergeom_pmf(x, 100, 40, 30);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hypergeom_pmf(5, 10, 3, 4) == 0.0);
    CHECK(hypergeom_pmf(-1, 10, 3, 4) == 0.0);
    CHECK_THROWS_AS(hypergeom_pmf(0, 10, 11, 2), std::domain_error);
    CHECK_THROWS_AS(hypergeom_pmf(0, 10, 2, 11), std::domain_error);
  }

  TEST_CASE("Wallenius univariate reference values") {
    // Exact rational recursion, evaluated independently.
    CHECK(wallenius_pmf(9, 50, 50, 10, 9.0) == doctest::Approx(0.3938554925614884).epsilon(1e-11));
    CHECK(wallenius_pmf(10, 50, 50, 10, 9.0) == doctest::Approx(0.3146963881249806).epsilon(1e-11));
    CHECK(wallenius_pmf(11, 50, 50, 10, 9.0) == 0.0);
    CHECK_THROWS_AS(wallenius_pmf(1, 5, 5, 11, 2.0), std::domain_error);
    CHECK_THROWS_AS(wallenius_pmf(1, 5, 5, 3, 0.0), std::domain_error);
  }

  TEST_CASE("Wallenius multivariate reference value") {
    const std::vector<int> counts{4, 3, 2};
    const WalleniusParams p{{20, 30, 10}, {6.0, 2.0, 1.0}, 9};
    CHECK(wallenius_pmf(counts, p) == doctest::Approx(0.021187520465562642).epsilon(1e-11));
  }

  TEST_CASE("Wallenius agrees with the sequential-draw recursion") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      std::uniform_int_distribution<int> size(1, 12);
      std::uniform_real_distribution<double> w(0.05, 20.0);
      const std::vector<int> sizes{size(rng), size(rng), size(rng)};
      const std::vector<double> weights{w(rng), w(rng), w(rng)};
      const int total = sizes[0] + sizes[1] + sizes[2];
      const int n = std::uniform_int_distribution<int>(0, total)(rng);
      const WalleniusParams p{sizes, weights, n};
      double sum = 0.0;
      for (int a = 0; a <= std::min(n, sizes[0]); ++a) {
        for (int b = 0; b <= std::min(n - a, sizes[1]); ++b) {
          const int c = n - a - b;
          if (c > sizes[2]) continue;
          const std::vector<int> counts{a, b, c};
          const double got = wallenius_pmf(counts, p);
          const double want = oracle::wallenius_dp(sizes, weights, counts);
          CHECK(got == doctest::Approx(want).epsilon(1e-9).scale(1e-12));
          sum += got;
        }
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("Wallenius parameter validation") {
    const std::vector<int> counts{1, 1};
    CHECK_THROWS_AS(wallenius_pmf(counts, WalleniusParams{{2}, {1.0}, 1}), std::domain_error);
    CHECK_THROWS_AS(wallenius_pmf(counts, WalleniusParams{{2, 2}, {1.0, -1.0}, 2}), std::domain_error);
    CHECK_THROWS_AS(wallenius_pmf(counts, WalleniusParams{{2, 2}, {1.0, 1.0}, 3}), std::domain_error);
    CHECK_THROWS_AS(wallenius_pmf(counts, WalleniusParams{{2, 2}, {1.0, 1.0}, 5}), std::domain_error);
    const std::vector<int> bad{3, -1};
    CHECK_THROWS_AS(wallenius_pmf(bad, WalleniusParams{{2, 2}, {1.0, 1.0}, 2}), std::domain_error);
  }

  TEST_CASE("weighted sampling without replacement") {
    Rng rng(5);
    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    const auto all = weighted_sample_without_replacement(w, 4, rng);
    std::vector<std::size_t> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});

    // First draw is proportional to weight.
    std::vector<double> first(4, 0.0);
    const int n = 40000;
    for (int i = 0; i < n; ++i) first[weighted_sample_without_replacement(w, 2, rng)[0]] += 1.0;
    CHECK(oracle::chi_square_p(first, {0.1, 0.2, 0.3, 0.4}) > 1e-4);

    // Group counts follow the Wallenius law.
    const std::vector<double> items{5, 5, 5, 1, 1, 1, 1, 1};
    std::vector<double> hist(4, 0.0);
    for (int i = 0; i < n; ++i) {
      int heavy = 0;
      for (auto idx : weighted_sample_without_replacement(items, 3, rng)) heavy += idx < 3 ? 1 : 0;
      hist[static_cast<std::size_t>(heavy)] += 1.0;
    }
    std::vector<double> expect(4);
    for (int x = 0; x <= 3; ++x) expect[static_cast<std::size_t>(x)] = wallenius_pmf(x, 3, 5, 3, 5.0);
    CHECK(oracle::chi_square_p(hist, expect) > 1e-4);

    CHECK_THROWS_AS(weighted_sample_without_replacement(w, 5, rng), std::domain_error);
    const std::vector<double> zero{1.0, 0.0};
    CHECK_THROWS_AS(weighted_sample_without_replacement(zero, 1, rng), std::domain_error);
  }
}
