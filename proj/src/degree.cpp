#include "ltfb/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ltfb {

double DegreeDistribution::mean() const {
  double m = 0.0;
  for (int i = 0; i <= k; ++i) m += i * pmf[static_cast<std::size_t>(i)];
  return m;
}

void validate_distribution(const DegreeDistribution& dist, bool encoder_side) {
  if (dist.k < 0) throw std::domain_error("degree distribution: k must be nonnegative");
  if (dist.pmf.size() != static_cast<std::size_t>(dist.k) + 1) {
    throw std::domain_error("degree distribution: pmf must have k + 1 entries");
  }
  double total = 0.0;
  for (double p : dist.pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::domain_error("degree distribution: probabilities must be nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::domain_error("degree distribution: probabilities sum to " + std::to_string(total));
  }
  if (encoder_side && (dist.k < 1 || dist.pmf[0] != 0.0)) {
    throw std::domain_error("degree distribution: encoder distributions need k >= 1, pmf[0] = 0");
  }
}

DegreeDistribution make_distribution(std::vector<double> weights) {
  if (weights.empty()) throw std::domain_error("make_distribution: empty weight vector");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::domain_error("make_distribution: weights sum to zero");
  for (double& w : weights) w /= total;
  DegreeDistribution dist{static_cast<int>(weights.size()) - 1, std::move(weights)};
  validate_distribution(dist, false);
  return dist;
}

DegreeDistribution embed(const DegreeDistribution& dist, int k) {
  if (k < dist.k) {
    for (int i = k + 1; i <= dist.k; ++i) {
      if (dist[i] != 0.0) throw std::domain_error("embed: mass above the target block size");
    }
  }
  DegreeDistribution out{k, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0)};
  for (int i = 0; i <= std::min(k, dist.k); ++i) out.pmf[static_cast<std::size_t>(i)] = dist[i];
  return out;
}

double RsdParams::spread() const {
  return c * std::log(static_cast<double>(k) / delta) * std::sqrt(static_cast<double>(k));
}

int RsdParams::spike() const {
  return static_cast<int>(std::ceil(static_cast<double>(k) / spread()));
}

void RsdParams::validate() const {
  if (k < 1) throw std::domain_error("RSD: k must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("RSD: c must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("RSD: delta must lie in (0, 1]");
  if (k > 1) {
    const double s = spread();
    if (!(s > 0.0) || s > k) {
      throw std::domain_error("RSD: spread S = c ln(k/delta) sqrt(k) = " + std::to_string(s) +
                              " must lie in (0, k]");
    }
  }
}

DegreeDistribution robust_soliton(const RsdParams& params) {
  params.validate();
  const int k = params.k;
  if (k == 1) return DegreeDistribution{1, {0.0, 1.0}};

  const double s = params.spread();
  const double pivot = static_cast<double>(k) / s;
  const int spike = params.spike();
  std::vector<double> w(static_cast<std::size_t>(k) + 1, 0.0);
  w[1] = 1.0 / k;
  for (int i = 2; i <= k; ++i) w[static_cast<std::size_t>(i)] = 1.0 / (static_cast<double>(i) * (i - 1));
  for (int i = 1; i <= k && i < pivot; ++i) w[static_cast<std::size_t>(i)] += s / (static_cast<double>(i) * k);
  // A spike beyond k (S < 1) is outside the support and dropped.
  if (spike <= k) w[static_cast<std::size_t>(spike)] += s * std::log(s / params.delta) / k;
  auto dist = make_distribution(std::move(w));
  validate_distribution(dist, true);
  return dist;
}

DegreeDistribution ideal_soliton(int k) {
  if (k < 1) throw std::domain_error("ideal_soliton: k must be positive");
  std::vector<double> w(static_cast<std::size_t>(k) + 1, 0.0);
  w[1] = 1.0 / k;
  for (int i = 2; i <= k; ++i) w[static_cast<std::size_t>(i)] = 1.0 / (static_cast<double>(i) * (i - 1));
  return make_distribution(std::move(w));
}

DegreeSampler::DegreeSampler(DegreeDistribution dist) : dist_(std::move(dist)) {
  validate_distribution(dist_, false);
  cdf_.resize(dist_.pmf.size());
  std::partial_sum(dist_.pmf.begin(), dist_.pmf.end(), cdf_.begin());
}

int DegreeSampler::operator()(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, cdf_.back());
  const double u = unit(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t degree = static_cast<std::size_t>(it - cdf_.begin());
  if (it == cdf_.end()) {
    // Rounding at the top of the table: fall back to the largest supported degree.
    degree = cdf_.size() - 1;
    while (degree > 0 && dist_.pmf[degree] == 0.0) --degree;
  }
  return static_cast<int>(degree);
}

int sample_degree(const DegreeDistribution& dist, Rng& rng) { return DegreeSampler(dist)(rng); }

namespace {

void check_undecoded(const DegreeDistribution& original, int undecoded) {
  if (undecoded < 0 || undecoded > original.k) {
    throw std::domain_error("undecoded count L = " + std::to_string(undecoded) +
                            " outside [0, k = " + std::to_string(original.k) + "]");
  }
}

void check_acked(const DegreeDistribution& original, int undecoded, int acked) {
  check_undecoded(original, undecoded);
  if (acked < 0 || acked > original.k - undecoded) {
    throw std::domain_error("acknowledged count M = " + std::to_string(acked) +
                            " outside [0, k - L = " + std::to_string(original.k - undecoded) + "]");
  }
}

// Masses of `original` as applied over a block of `block` symbols: degrees
// above the block size are clamped onto it.
std::vector<double> clamped_masses(const DegreeDistribution& original, int block) {
  std::vector<double> masses(static_cast<std::size_t>(block) + 1, 0.0);
  if (block == 0) {
    masses[0] = original[0];
    return masses;
  }
  for (int i = 0; i <= original.k; ++i) masses[static_cast<std::size_t>(std::min(i, block))] += original[i];
  return masses;
}

// Reduced-degree pmf of `masses` (over `block` symbols) with `undecoded`
// of them still unknown. Output indexed 0..out_k.
DegreeDistribution reduce(const std::vector<double>& masses, int block, int undecoded, int out_k) {
  DegreeDistribution out{out_k, std::vector<double>(static_cast<std::size_t>(out_k) + 1, 0.0)};
  const int decoded = block - undecoded;
  for (int reduced = 0; reduced <= undecoded; ++reduced) {
    double acc = 0.0;
    const int top = std::min(block, reduced + decoded);
    for (int i = reduced; i <= top; ++i) {
      const double p = masses[static_cast<std::size_t>(i)];
      if (p == 0.0) continue;
      acc += p * hypergeom_pmf(reduced, block, undecoded, i);
    }
    out.pmf[static_cast<std::size_t>(reduced)] = acc;
  }
  return out;
}

}  // namespace

DegreeDistribution reduced_degree_dist(const DegreeDistribution& original, int undecoded) {
  check_undecoded(original, undecoded);
  return reduce(original.pmf, original.k, undecoded, original.k);
}

double redundancy_prob_acked(const DegreeDistribution& original, int undecoded, int acked) {
  check_acked(original, undecoded, acked);
  const int block = original.k - acked;
  const int decoded = block - undecoded;
  const auto masses = clamped_masses(original, block);
  // sum_i pi(i) C(k-M-L, i) / C(k-M, i)
  long double acc = 0.0L;
  for (int i = 0; i <= decoded; ++i) {
    const double p = masses[static_cast<std::size_t>(i)];
    if (p == 0.0) continue;
    const long double log_ratio = log_factorial(decoded) - log_factorial(decoded - i) -
                                  log_factorial(block) + log_factorial(block - i);
    acc += p * std::exp(log_ratio);
  }
  return static_cast<double>(acc);
}

DegreeDistribution reduced_degree_dist_acked(const DegreeDistribution& original, int undecoded,
                                             int acked) {
  check_acked(original, undecoded, acked);
  const int block = original.k - acked;
  // Nothing left to encode: no symbol is sent, so the encoder law is what remains.
  if (block == 0) return original;
  return reduce(clamped_masses(original, block), block, undecoded, original.k);
}

DegreeDistribution adaptive_degree_dist(const DegreeDistribution& original, int undecoded) {
  check_undecoded(original, undecoded);
  if (undecoded == 0) throw std::domain_error("adaptive_degree_dist: L = 0 leaves nothing to encode");
  const int k = original.k;
  const int decoded = k - undecoded;

  // pi'(0) = sum_j pi(j) C(k-L, j) / C(k, j)
  double redundant = 0.0;
  for (int j = 0; j <= decoded; ++j) {
    if (original[j] != 0.0) redundant += original[j] * hypergeom_pmf(0, k, undecoded, j);
  }
  const double keep = 1.0 - redundant;
  if (!(keep > 0.0)) throw std::domain_error("adaptive_degree_dist: every symbol would be redundant");

  // rho(i) = sum_{j=i}^{i+k-L} pi(j) C(L,i) C(k-L,j-i) / ((1 - pi'(0)) C(k,j))
  DegreeDistribution rho{undecoded, std::vector<double>(static_cast<std::size_t>(undecoded) + 1, 0.0)};
  for (int i = 1; i <= undecoded; ++i) {
    double acc = 0.0;
    const int top = std::min(k, i + decoded);
    for (int j = i; j <= top; ++j) {
      if (original[j] != 0.0) acc += original[j] * hypergeom_pmf(i, k, undecoded, j);
    }
    rho.pmf[static_cast<std::size_t>(i)] = acc / keep;
  }
  return rho;
}

}  // namespace ltfb
