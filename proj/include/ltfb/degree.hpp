#pragma once

#include <span>
#include <vector>

#include "ltfb/combinatorics.hpp"

namespace ltfb {

/// Probability mass over degrees 0..k, stored densely. `k` is the number of
/// input symbols the distribution is defined over; degrees above k carry no mass.
struct DegreeDistribution {
  int k = 0;
  std::vector<double> pmf;  // size k + 1

  double operator[](int degree) const {
    return degree >= 0 && degree <= k ? pmf[static_cast<std::size_t>(degree)] : 0.0;
  }
  double mean() const;
};

/// Checks shape, nonnegativity and normalization (1e-9). Encoder-side
/// distributions additionally need pmf[0] == 0.
void validate_distribution(const DegreeDistribution& dist, bool encoder_side);

/// Builds and validates a distribution from unnormalized weights over 0..k.
DegreeDistribution make_distribution(std::vector<double> weights);

/// Same masses viewed over a larger block of `k` symbols (zero-padded).
DegreeDistribution embed(const DegreeDistribution& dist, int k);

/// Robust Soliton parameters: spread S = c ln(k/delta) sqrt(k).
struct RsdParams {
  int k = 0;
  double c = 0.1;
  double delta = 1.0;

  double spread() const;
  /// Degree carrying the tau spike, ceil(k/S).
  int spike() const;
  void validate() const;
};

DegreeDistribution robust_soliton(const RsdParams& params);
DegreeDistribution ideal_soliton(int k);

/// Inverse-CDF sampler over a fixed distribution.
class DegreeSampler {
 public:
  explicit DegreeSampler(DegreeDistribution dist);

  int operator()(Rng& rng) const;
  const DegreeDistribution& distribution() const { return dist_; }

 private:
  DegreeDistribution dist_;
  std::vector<double> cdf_;
};

/// One-off draw; prefer DegreeSampler in loops.
int sample_degree(const DegreeDistribution& dist, Rng& rng);

/// Distribution of the reduced degree (neighbours still undecoded) of a fresh
/// symbol when `undecoded` of the k input symbols are not yet recovered.
DegreeDistribution reduced_degree_dist(const DegreeDistribution& original, int undecoded);

/// Chance that a fresh symbol is redundant when `acked` decoded symbols have
/// been excluded from encoding and `undecoded` symbols remain.
double redundancy_prob_acked(const DegreeDistribution& original, int undecoded, int acked);

/// Reduced-degree distribution when the encoder applies `original` over the
/// k - acked symbols that have not been acknowledged. Degrees above k - acked
/// are clamped to k - acked, as the encoder does.
DegreeDistribution reduced_degree_dist_acked(const DegreeDistribution& original, int undecoded,
                                             int acked);

/// Encoder distribution over the `undecoded` remaining symbols that, when every
/// decoded symbol is acknowledged, reproduces the reduced distribution of the
/// un-acknowledged code with the zero-degree mass removed. Result has k = undecoded.
DegreeDistribution adaptive_degree_dist(const DegreeDistribution& original, int undecoded);

}  // namespace ltfb
