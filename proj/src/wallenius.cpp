#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ltfb/combinatorics.hpp"

namespace ltfb {

namespace {

struct Term {
  double weight;
  int drawn;
};

// log(1 - t^a) for t in (0,1), accurate when t^a is close to one.
inline double log_one_minus_pow(double log_t, double a) {
  return std::log(-std::expm1(a * log_t));
}

// Solves  r*D - 1 = sum_g x_g * a_g / (2^a_g - 1),  a_g = r*w_g.  The left side
// increases and the right side decreases in r, so bisection on the bracket
// (0, (1 + sum x / ln 2) / D] converges to the unique root. With this r the
// transformed integrand has its maximum at t = 1/2.
double centring_scale(const std::vector<Term>& terms, double spread) {
  double drawn = 0.0;
  for (const Term& t : terms) drawn += t.drawn;
  auto excess = [&](double r) {
    double rhs = 0.0;
    for (const Term& t : terms) {
      const double a = r * t.weight;
      rhs += t.drawn * a / std::expm1(a * std::numbers::ln2);
    }
    return r * spread - 1.0 - rhs;
  };
  double lo = 0.0;
  double hi = (1.0 + drawn / std::numbers::ln2) / spread;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double wallenius_core(std::span<const int> counts, std::span<const int> sizes,
                      std::span<const double> weights) {
  long double log_prefactor = 0.0L;
  double spread = 0.0;
  std::vector<Term> terms;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    log_prefactor += log_factorial(sizes[g]) - log_factorial(counts[g]) -
                     log_factorial(sizes[g] - counts[g]);
    spread += weights[g] * (sizes[g] - counts[g]);
    if (counts[g] > 0) terms.push_back({weights[g], counts[g]});
  }
  // Every item drawn, or nothing drawn: the outcome is certain.
  if (terms.empty() || spread <= 0.0) return static_cast<double>(std::exp(log_prefactor));

  // Substituting t -> t^(r D) turns the integral into
  //   Int_0^1 rD t^(rD-1) prod_g (1 - t^(r w_g))^(x_g) dt
  // for any r > 0.
  const double r = centring_scale(terms, spread);
  const double exponent = r * spread;
  auto log_integrand = [&](double t) {
    const double log_t = std::log(t);
    double v = std::log(exponent) + (exponent - 1.0) * log_t;
    for (const Term& term : terms) v += term.drawn * log_one_minus_pow(log_t, r * term.weight);
    return v;
  };
  const double log_peak = log_integrand(0.5);
  auto scaled = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(log_integrand(t) - log_peak);
  };

  // tanh-sinh copes with the t^(rD-1) endpoint behaviour when rD < 1.
  thread_local boost::math::quadrature::tanh_sinh<double> quadrature;
  // Peak sits at t = 1/2.
  const double left = quadrature.integrate(scaled, 0.0, 0.5, 1e-13);
  const double right = quadrature.integrate(scaled, 0.5, 1.0, 1e-13);
  const long double log_scale = log_prefactor + static_cast<long double>(log_peak);
  const double p = static_cast<double>(std::exp(log_scale) * static_cast<long double>(left + right));
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double wallenius_pmf(std::span<const int> counts, const WalleniusParams& params) {
  params.validate();
  if (counts.size() != params.group_sizes.size()) {
    throw std::domain_error("wallenius_pmf: counts and group_sizes differ in length");
  }
  long long total = 0;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    if (counts[g] < 0 || counts[g] > params.group_sizes[g]) {
      throw std::domain_error("wallenius_pmf: count outside [0, group_size]");
    }
    total += counts[g];
  }
  if (total != params.draws) throw std::domain_error("wallenius_pmf: counts must sum to draws");
  return wallenius_core(counts, params.group_sizes, params.weights);
}

double wallenius_pmf(int x, int m1, int m2, int n, double odds) {
  if (m1 < 0 || m2 < 0 || n < 0 || n > m1 + m2) {
    throw std::domain_error("wallenius_pmf: requires 0 <= n <= m1 + m2");
  }
  if (!(odds > 0.0) || !std::isfinite(odds)) {
    throw std::domain_error("wallenius_pmf: odds must be positive and finite");
  }
  if (x < 0 || x > m1 || n - x < 0 || n - x > m2) return 0.0;
  const std::array<int, 2> counts{x, n - x};
  const std::array<int, 2> sizes{m1, m2};
  const std::array<double, 2> weights{odds, 1.0};
  return wallenius_core(counts, sizes, weights);
}

}  // namespace ltfb
