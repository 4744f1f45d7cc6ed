#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace ltfb {

/// Random stream used throughout the library. Every sampling routine takes one
/// explicitly; nothing draws from global state.
using Rng = std::mt19937_64;

/// Natural log of n! with extended internal precision. Values up to 2^16 come
/// from a table built on first use.
long double log_factorial(int n);

/// ln C(n, r); -infinity when r > n or r < 0.
double log_binomial(int n, int r);

/// P(X = x) for X ~ Hypergeometric(population, successes, draws): the chance
/// that `draws` items taken uniformly without replacement contain exactly x of
/// the `successes` marked items. Zero outside the support.
double hypergeom_pmf(int x, int population, int successes, int draws);

/// Parameters of a (multivariate) Wallenius noncentral hypergeometric law:
/// `draws` items are removed one at a time, each remaining item of group g
/// being picked with probability proportional to weights[g].
struct WalleniusParams {
  std::vector<int> group_sizes;
  std::vector<double> weights;
  int draws = 0;

  /// Throws std::domain_error when an invariant does not hold.
  void validate() const;
};

/// Probability that the weighted urn yields exactly `counts[g]` items from each
/// group. Evaluated through the integral representation
///
///   prod_g C(m_g, x_g) * Int_0^1 prod_g (1 - t^(w_g / D))^(x_g) dt,
///   D = sum_g w_g (m_g - x_g),
///
/// after a change of variable that centres the integrand peak, using adaptive
/// Gauss-Kronrod quadrature.
double wallenius_pmf(std::span<const int> counts, const WalleniusParams& params);

/// Univariate form: x of the n draws come from the first group (size m1,
/// relative weight `odds`), the rest from the second group (size m2, weight 1).
double wallenius_pmf(int x, int m1, int m2, int n, double odds);

/// Draws n distinct indices one at a time, each draw proportional to the
/// weights of the items still in the urn. Indices are returned in draw order.
std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> item_weights,
                                                             std::size_t n, Rng& rng);

}  // namespace ltfb
