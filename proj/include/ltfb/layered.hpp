#pragma once

#include <span>
#include <vector>

#include "ltfb/degree.hpp"

namespace ltfb {

/// Split of the k input symbols into contiguous layers (most important first)
/// together with relative per-symbol selection weights. For two layers the
/// favouring of the base layer is beta = weights[0] / weights[1].
struct LayerConfig {
  std::vector<int> layer_sizes;
  std::vector<double> weights;

  /// alpha*k base symbols (rounded), (1-alpha)*k refinement symbols, weights (beta, 1).
  static LayerConfig two_layer(int k, double alpha, double beta);
  /// One layer spanning the whole block.
  static LayerConfig single(int k);

  int total() const;
  int count() const { return static_cast<int>(layer_sizes.size()); }
  /// First index of layer `layer` within the block.
  int offset(int layer) const;
  /// Per-symbol selection probabilities p_j, normalized so sum_j p_j |layer j| = 1.
  std::vector<double> selection_probabilities() const;
  void validate() const;
};

/// Joint distribution of (base, refinement) reduced degrees, row-major over
/// (base_undecoded + 1) x (refinement_undecoded + 1).
struct TwoLayerReducedDist {
  int base_undecoded = 0;
  int refinement_undecoded = 0;
  std::vector<double> pmf;

  double at(int base, int refinement) const;
  /// Distribution of base + refinement reduced degree, indexed 0..k.
  std::vector<double> total_degree_marginal(int k) const;
};

/// Precomputes the Wallenius split table of a two-layer code so that many
/// (L_B, L_R) points can be evaluated cheaply.
class TwoLayerAnalyzer {
 public:
  TwoLayerAnalyzer(DegreeDistribution original, LayerConfig layers);

  TwoLayerReducedDist reduced(int base_undecoded, int refinement_undecoded) const;
  /// pi'(0,0) alone, without building the whole table.
  double redundancy(int base_undecoded, int refinement_undecoded) const;

  /// P(j of i neighbours fall in the base layer).
  double split(int degree, int base_neighbours) const;

 private:
  void check(int base_undecoded, int refinement_undecoded) const;

  DegreeDistribution original_;
  int base_size_;
  int refinement_size_;
  std::vector<std::vector<double>> split_;  // split_[i][j]
};

TwoLayerReducedDist two_layer_reduced_dist(const DegreeDistribution& original,
                                           const LayerConfig& layers, int base_undecoded,
                                           int refinement_undecoded);

/// N-dimensional reduced-degree distribution, row-major over
/// (undecoded[0] + 1) x ... x (undecoded[N-1] + 1).
struct MultiLayerReducedDist {
  std::vector<int> extents;
  std::vector<double> pmf;

  double at(std::span<const int> reduced) const;
  std::size_t flat_index(std::span<const int> reduced) const;
  std::vector<int> unflatten(std::size_t flat) const;
  std::vector<double> total_degree_marginal(int k) const;
};

MultiLayerReducedDist n_layer_reduced_dist(const DegreeDistribution& original,
                                           const LayerConfig& layers,
                                           std::span<const int> undecoded);

}  // namespace ltfb
