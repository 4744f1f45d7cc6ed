#include "ltfb/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ltfb {

namespace {

constexpr int kTableSize = 1 << 16;

const std::vector<long double>& log_factorial_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kTableSize);
    for (int i = 0; i < kTableSize; ++i) t[i] = std::lgamma(static_cast<long double>(i) + 1.0L);
    return t;
  }();
  return table;
}

// Fenwick tree over item weights; supports proportional selection and removal.
class WeightTree {
 public:
  explicit WeightTree(std::span<const double> weights) : tree_(weights.size() + 1, 0.0) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      std::size_t j = i + 1;
      tree_[j] += weights[i];
      std::size_t parent = j + (j & (~j + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[j];
    }
    mask_ = 1;
    while (mask_ * 2 < tree_.size()) mask_ *= 2;
  }

  double total() const {
    double s = 0.0;
    for (std::size_t j = tree_.size() - 1; j > 0; j -= j & (~j + 1)) s += tree_[j];
    return s;
  }

  // Smallest index whose inclusive prefix sum exceeds u.
  std::size_t find(double u) const {
    std::size_t pos = 0;
    for (std::size_t step = mask_; step > 0; step >>= 1) {
      std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= u) {
        pos = next;
        u -= tree_[next];
      }
    }
    return pos;  // zero-based item index
  }

  void add(std::size_t index, double delta) {
    for (std::size_t j = index + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
  }

 private:
  std::vector<double> tree_;
  std::size_t mask_ = 1;
};

}  // namespace

long double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n < kTableSize) return log_factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

double log_binomial(int n, int r) {
  if (n < 0) throw std::domain_error("log_binomial: n must be nonnegative");
  if (r < 0 || r > n) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(log_factorial(n) - log_factorial(r) - log_factorial(n - r));
}

double hypergeom_pmf(int x, int population, int successes, int draws) {
  if (population < 0 || successes < 0 || successes > population || draws < 0 ||
      draws > population) {
    throw std::domain_error("hypergeom_pmf: requires 0 <= successes, draws <= population");
  }
  const int failures = population - successes;
  if (x < 0 || x > successes || x > draws || draws - x > failures) return 0.0;
  const long double log_p = log_factorial(successes) - log_factorial(x) -
                            log_factorial(successes - x) + log_factorial(failures) -
                            log_factorial(draws - x) - log_factorial(failures - draws + x) -
                            log_factorial(population) + log_factorial(draws) +
                            log_factorial(population - draws);
  return static_cast<double>(std::exp(log_p));
}

void WalleniusParams::validate() const {
  if (group_sizes.size() != weights.size()) {
    throw std::domain_error("WalleniusParams: group_sizes and weights differ in length");
  }
  if (group_sizes.size() < 2) throw std::domain_error("WalleniusParams: need at least two groups");
  long long total = 0;
  for (int m : group_sizes) {
    if (m < 0) throw std::domain_error("WalleniusParams: negative group size");
    total += m;
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::domain_error("WalleniusParams: weights must be positive and finite");
    }
  }
  if (draws < 0 || draws > total) {
    throw std::domain_error("WalleniusParams: draws must lie in [0, sum(group_sizes)]");
  }
}

std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> item_weights,
                                                             std::size_t n, Rng& rng) {
  if (n > item_weights.size()) {
    throw std::domain_error("weighted_sample_without_replacement: n exceeds item count (" +
                            std::to_string(n) + " > " + std::to_string(item_weights.size()) + ")");
  }
  for (double w : item_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::domain_error("weighted_sample_without_replacement: weights must be positive");
    }
  }

  std::vector<std::size_t> out;
  out.reserve(n);
  std::vector<double> alive(item_weights.begin(), item_weights.end());
  WeightTree tree(alive);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t draw = 0; draw < n; ++draw) {
    const double u = unit(rng) * tree.total();
    std::size_t idx = std::min(tree.find(u), alive.size() - 1);
    if (alive[idx] == 0.0) {
      // u landed on a rounding boundary; take the nearest remaining item.
      auto it = std::find_if(alive.begin() + static_cast<std::ptrdiff_t>(idx), alive.end(),
                             [](double w) { return w > 0.0; });
      if (it == alive.end()) {
        it = std::find_if(alive.begin(), alive.end(), [](double w) { return w > 0.0; });
      }
      idx = static_cast<std::size_t>(it - alive.begin());
    }
    tree.add(idx, -alive[idx]);
    alive[idx] = 0.0;
    out.push_back(idx);
  }
  return out;
}

}  // namespace ltfb
