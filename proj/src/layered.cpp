#include "ltfb/layered.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ltfb/combinatorics.hpp"
#include "ltfb/simd/kernels.hpp"

namespace ltfb {

LayerConfig LayerConfig::two_layer(int k, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("two-layer code: alpha must lie in (0, 1)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::domain_error("two-layer code: beta must be positive");
  const int base = static_cast<int>(std::lround(alpha * k));
  LayerConfig cfg{{base, k - base}, {beta, 1.0}};
  cfg.validate();
  return cfg;
}

LayerConfig LayerConfig::single(int k) {
  LayerConfig cfg{{k}, {1.0}};
  cfg.validate();
  return cfg;
}

int LayerConfig::total() const { return std::accumulate(layer_sizes.begin(), layer_sizes.end(), 0); }

int LayerConfig::offset(int layer) const {
  return std::accumulate(layer_sizes.begin(), layer_sizes.begin() + layer, 0);
}

std::vector<double> LayerConfig::selection_probabilities() const {
  double norm = 0.0;
  for (std::size_t j = 0; j < layer_sizes.size(); ++j) norm += weights[j] * layer_sizes[j];
  std::vector<double> p(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) p[j] = weights[j] / norm;
  return p;
}

void LayerConfig::validate() const {
  if (layer_sizes.empty()) throw std::domain_error("layers: at least one layer required");
  if (layer_sizes.size() != weights.size()) {
    throw std::domain_error("layers: layer_sizes and weights differ in length");
  }
  for (int m : layer_sizes) {
    if (m < 1) throw std::domain_error("layers: every layer needs at least one symbol");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::domain_error("layers: weights must be positive");
  }
}

double TwoLayerReducedDist::at(int base, int refinement) const {
  if (base < 0 || base > base_undecoded || refinement < 0 || refinement > refinement_undecoded) return 0.0;
  return pmf[static_cast<std::size_t>(base) * (refinement_undecoded + 1) + refinement];
}

std::vector<double> TwoLayerReducedDist::total_degree_marginal(int k) const {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (int b = 0; b <= base_undecoded; ++b) {
    for (int r = 0; r <= refinement_undecoded; ++r) out[static_cast<std::size_t>(b + r)] += at(b, r);
  }
  return out;
}

TwoLayerAnalyzer::TwoLayerAnalyzer(DegreeDistribution original, LayerConfig layers)
    : original_(std::move(original)) {
  layers.validate();
  if (layers.count() != 2) throw std::domain_error("two-layer analysis needs exactly two layers");
  if (layers.total() != original_.k) {
    throw std::domain_error("two-layer analysis: layer sizes must sum to k = " + std::to_string(original_.k));
  }
  validate_distribution(original_, false);
  base_size_ = layers.layer_sizes[0];
  refinement_size_ = layers.layer_sizes[1];
  const double beta = layers.weights[0] / layers.weights[1];
  split_.resize(static_cast<std::size_t>(original_.k) + 1);
  for (int i = 0; i <= original_.k; ++i) {
    auto& row = split_[static_cast<std::size_t>(i)];
    row.assign(static_cast<std::size_t>(base_size_) + 1, 0.0);
    if (original_[i] == 0.0) continue;
    const int lo = std::max(0, i - refinement_size_);
    const int hi = std::min(i, base_size_);
    for (int j = lo; j <= hi; ++j) {
      row[static_cast<std::size_t>(j)] = wallenius_pmf(j, base_size_, refinement_size_, i, beta);
    }
  }
}

double TwoLayerAnalyzer::split(int degree, int base_neighbours) const {
  if (degree < 0 || degree > original_.k || base_neighbours < 0 || base_neighbours > base_size_) return 0.0;
  return split_[static_cast<std::size_t>(degree)][static_cast<std::size_t>(base_neighbours)];
}

void TwoLayerAnalyzer::check(int base_undecoded, int refinement_undecoded) const {
  if (base_undecoded < 0 || base_undecoded > base_size_) {
    throw std::domain_error("L_B = " + std::to_string(base_undecoded) + " outside [0, " +
                            std::to_string(base_size_) + "]");
  }
  if (refinement_undecoded < 0 || refinement_undecoded > refinement_size_) {
    throw std::domain_error("L_R = " + std::to_string(refinement_undecoded) + " outside [0, " +
                            std::to_string(refinement_size_) + "]");
  }
}

TwoLayerReducedDist TwoLayerAnalyzer::reduced(int base_undecoded, int refinement_undecoded) const {
  check(base_undecoded, refinement_undecoded);
  const auto rows = static_cast<std::size_t>(base_undecoded) + 1;
  const auto cols = static_cast<std::size_t>(refinement_undecoded) + 1;

  // base_split[j][b]: b of j base neighbours undecoded; likewise for refinement.
  std::vector<std::vector<double>> base_split(static_cast<std::size_t>(base_size_) + 1,
                                              std::vector<double>(rows, 0.0));
  for (int j = 0; j <= base_size_; ++j) {
    for (int b = 0; b <= base_undecoded; ++b) {
      base_split[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] =
          hypergeom_pmf(b, base_size_, base_undecoded, j);
    }
  }
  std::vector<std::vector<double>> refinement_split(static_cast<std::size_t>(refinement_size_) + 1,
                                                    std::vector<double>(cols, 0.0));
  for (int j = 0; j <= refinement_size_; ++j) {
    for (int r = 0; r <= refinement_undecoded; ++r) {
      refinement_split[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] =
          hypergeom_pmf(r, refinement_size_, refinement_undecoded, j);
    }
  }

  TwoLayerReducedDist out{base_undecoded, refinement_undecoded, std::vector<double>(rows * cols, 0.0)};
  for (int i = 1; i <= original_.k; ++i) {
    const double p = original_[i];
    if (p == 0.0) continue;
    const int lo = std::max(0, i - refinement_size_);
    const int hi = std::min(i, base_size_);
    for (int j = lo; j <= hi; ++j) {
      const double w = p * split_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (w == 0.0) continue;
      const auto& bs = base_split[static_cast<std::size_t>(j)];
      const auto& rs = refinement_split[static_cast<std::size_t>(i - j)];
      for (std::size_t b = 0; b < rows; ++b) {
        const double wb = w * bs[b];
        if (wb == 0.0) continue;
        simd::axpy(wb, rs, std::span<double>(out.pmf).subspan(b * cols, cols));
      }
    }
  }
  return out;
}

double TwoLayerAnalyzer::redundancy(int base_undecoded, int refinement_undecoded) const {
  check(base_undecoded, refinement_undecoded);
  double acc = 0.0;
  for (int i = 1; i <= original_.k; ++i) {
    const double p = original_[i];
    if (p == 0.0) continue;
    const int lo = std::max(0, i - refinement_size_);
    const int hi = std::min(i, base_size_);
    for (int j = lo; j <= hi; ++j) {
      const double phi = split_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (phi == 0.0) continue;
      acc += p * phi * hypergeom_pmf(0, base_size_, base_undecoded, j) *
             hypergeom_pmf(0, refinement_size_, refinement_undecoded, i - j);
    }
  }
  return acc;
}

TwoLayerReducedDist two_layer_reduced_dist(const DegreeDistribution& original,
                                           const LayerConfig& layers, int base_undecoded,
                                           int refinement_undecoded) {
  return TwoLayerAnalyzer(original, layers).reduced(base_undecoded, refinement_undecoded);
}

std::size_t MultiLayerReducedDist::flat_index(std::span<const int> reduced) const {
  if (reduced.size() != extents.size()) throw std::domain_error("reduced degree has wrong dimension");
  std::size_t flat = 0;
  for (std::size_t n = 0; n < extents.size(); ++n) {
    flat = flat * static_cast<std::size_t>(extents[n]) + static_cast<std::size_t>(reduced[n]);
  }
  return flat;
}

std::vector<int> MultiLayerReducedDist::unflatten(std::size_t flat) const {
  std::vector<int> idx(extents.size());
  for (std::size_t n = extents.size(); n-- > 0;) {
    idx[n] = static_cast<int>(flat % static_cast<std::size_t>(extents[n]));
    flat /= static_cast<std::size_t>(extents[n]);
  }
  return idx;
}

double MultiLayerReducedDist::at(std::span<const int> reduced) const {
  if (reduced.size() != extents.size()) throw std::domain_error("reduced degree has wrong dimension");
  for (std::size_t n = 0; n < extents.size(); ++n) {
    if (reduced[n] < 0 || reduced[n] >= extents[n]) return 0.0;
  }
  return pmf[flat_index(reduced)];
}

std::vector<double> MultiLayerReducedDist::total_degree_marginal(int k) const {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::size_t f = 0; f < pmf.size(); ++f) {
    const auto idx = unflatten(f);
    out[static_cast<std::size_t>(std::accumulate(idx.begin(), idx.end(), 0))] += pmf[f];
  }
  return out;
}

namespace {

// Calls fn(j) for every composition j of `total` with 0 <= j[n] <= caps[n].
template <class Fn>
void for_each_composition(std::span<const int> caps, int total, Fn&& fn) {
  const std::size_t n = caps.size();
  std::vector<int> suffix_cap(n + 1, 0);
  for (std::size_t g = n; g-- > 0;) suffix_cap[g] = suffix_cap[g + 1] + caps[g];
  std::vector<int> j(n, 0);
  auto rec = [&](auto&& self, std::size_t g, int remaining) -> void {
    if (g + 1 == n) {
      if (remaining <= caps[g]) {
        j[g] = remaining;
        fn(std::span<const int>(j));
      }
      return;
    }
    const int lo = std::max(0, remaining - suffix_cap[g + 1]);
    const int hi = std::min(caps[g], remaining);
    for (int v = lo; v <= hi; ++v) {
      j[g] = v;
      self(self, g + 1, remaining - v);
    }
  };
  if (total <= suffix_cap[0]) rec(rec, 0, total);
}

}  // namespace

MultiLayerReducedDist n_layer_reduced_dist(const DegreeDistribution& original,
                                           const LayerConfig& layers,
                                           std::span<const int> undecoded) {
  layers.validate();
  validate_distribution(original, false);
  const std::size_t n = layers.layer_sizes.size();
  if (n < 2) throw std::domain_error("n-layer analysis needs at least two layers");
  if (undecoded.size() != n) {
    throw std::domain_error("n-layer analysis: undecoded has " + std::to_string(undecoded.size()) +
                            " entries for " + std::to_string(n) + " layers");
  }
  if (layers.total() != original.k) {
    throw std::domain_error("n-layer analysis: layer sizes must sum to k = " + std::to_string(original.k));
  }
  for (std::size_t g = 0; g < n; ++g) {
    if (undecoded[g] < 0 || undecoded[g] > layers.layer_sizes[g]) {
      throw std::domain_error("n-layer analysis: undecoded[" + std::to_string(g) + "] outside [0, layer size]");
    }
  }

  MultiLayerReducedDist out;
  out.extents.resize(n);
  std::size_t cells = 1;
  for (std::size_t g = 0; g < n; ++g) {
    out.extents[g] = undecoded[g] + 1;
    cells *= static_cast<std::size_t>(out.extents[g]);
  }
  out.pmf.assign(cells, 0.0);

  // splits[g][j][r]: r of j neighbours in layer g undecoded.
  std::vector<std::vector<std::vector<double>>> splits(n);
  for (std::size_t g = 0; g < n; ++g) {
    const int size = layers.layer_sizes[g];
    splits[g].assign(static_cast<std::size_t>(size) + 1,
                     std::vector<double>(static_cast<std::size_t>(undecoded[g]) + 1, 0.0));
    for (int j = 0; j <= size; ++j) {
      for (int r = 0; r <= undecoded[g]; ++r) {
        splits[g][static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] =
            hypergeom_pmf(r, size, undecoded[g], j);
      }
    }
  }

  WalleniusParams params{layers.layer_sizes, layers.weights, 0};
  std::vector<double> partial(cells), next(cells);
  for (int i = 1; i <= original.k; ++i) {
    const double p = original[i];
    if (p == 0.0) continue;
    params.draws = i;
    for_each_composition(layers.layer_sizes, i, [&](std::span<const int> j) {
      const double phi = wallenius_pmf(j, params);
      if (phi == 0.0) return;
      // Outer product of the per-layer split vectors, built one layer at a time.
      std::size_t width = 1;
      partial[0] = p * phi;
      for (std::size_t g = 0; g < n; ++g) {
        const auto& row = splits[g][static_cast<std::size_t>(j[g])];
        const std::size_t ext = row.size();
        for (std::size_t a = 0; a < width; ++a) {
          for (std::size_t r = 0; r < ext; ++r) next[a * ext + r] = partial[a] * row[r];
        }
        width *= ext;
        std::swap(partial, next);
      }
      simd::axpy(1.0, std::span<const double>(partial.data(), cells), out.pmf);
    });
  }
  return out;
}

}  // namespace ltfb
