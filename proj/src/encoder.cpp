#include <algorithm>
#include <stdexcept>
#include <string>

#include "ltfb/codec.hpp"
#include "ltfb/simd/kernels.hpp"

namespace ltfb {

InputBlock::InputBlock(int k, std::size_t width, std::vector<std::uint8_t> data,
                       std::optional<LayerConfig> layers)
    : k_(k), width_(width), data_(std::move(data)), layers_(std::move(layers)) {
  if (k_ < 1) throw std::domain_error("InputBlock: k must be positive");
  if (width_ < 1) throw std::domain_error("InputBlock: symbol width must be at least one byte");
  if (data_.size() != static_cast<std::size_t>(k_) * width_) {
    throw std::domain_error("InputBlock: data size must equal k * width");
  }
  if (layers_) {
    layers_->validate();
    if (layers_->total() != k_) throw std::domain_error("InputBlock: layer sizes must sum to k");
    effective_layers_ = *layers_;
  } else {
    effective_layers_ = LayerConfig::single(k_);
  }
  layer_of_.reserve(static_cast<std::size_t>(k_));
  for (int layer = 0; layer < effective_layers_.count(); ++layer) {
    layer_of_.insert(layer_of_.end(), static_cast<std::size_t>(effective_layers_.layer_sizes[static_cast<std::size_t>(layer)]), layer);
  }
}

InputBlock InputBlock::random(int k, std::size_t width, Rng& rng, std::optional<LayerConfig> layers) {
  if (k < 1 || width < 1) throw std::domain_error("InputBlock: k and width must be positive");
  std::vector<std::uint8_t> data(static_cast<std::size_t>(k) * width);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : data) b = static_cast<std::uint8_t>(byte(rng));
  return InputBlock(k, width, std::move(data), std::move(layers));
}

Encoder::Encoder(const InputBlock& block, std::shared_ptr<const DegreeSampler> sampler, std::uint64_t seed)
    : block_(&block), rng_(seed) {
  const auto& layers = block.layers();
  members_.resize(static_cast<std::size_t>(layers.count()));
  position_.assign(static_cast<std::size_t>(block.k()), -1);
  for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(block.k()); ++i) {
    auto& group = members_[static_cast<std::size_t>(block.layer_of(i))];
    position_[i] = static_cast<std::int32_t>(group.size());
    group.push_back(i);
  }
  eligible_count_ = block.k();
  group_draws_.resize(members_.size());
  set_sampler(std::move(sampler));
}

Encoder::Encoder(const InputBlock& block, const DegreeDistribution& dist, std::uint64_t seed)
    : Encoder(block, std::make_shared<const DegreeSampler>(dist), seed) {}

void Encoder::set_sampler(std::shared_ptr<const DegreeSampler> sampler) {
  if (!sampler) throw std::invalid_argument("Encoder: null degree sampler");
  if (sampler->distribution().pmf[0] != 0.0) {
    throw std::domain_error("Encoder: degree distribution must not emit degree zero");
  }
  sampler_ = std::move(sampler);
}

void Encoder::exclude(std::uint32_t index) {
  if (index >= position_.size()) {
    throw std::domain_error("Encoder::exclude: index " + std::to_string(index) + " outside the block");
  }
  const std::int32_t slot = position_[index];
  if (slot < 0) return;
  auto& group = members_[static_cast<std::size_t>(block_->layer_of(index))];
  const std::uint32_t moved = group.back();
  group[static_cast<std::size_t>(slot)] = moved;
  position_[moved] = slot;
  group.pop_back();
  position_[index] = -1;
  --eligible_count_;
}

void Encoder::choose_neighbors(int degree, std::vector<std::uint32_t>& out) {
  const auto& weights = block_->layers().weights;
  std::fill(group_draws_.begin(), group_draws_.end(), 0);

  // Group sequence of the weighted urn: each draw picks layer g with
  // probability proportional to w_g times the symbols of g still in the urn.
  if (members_.size() == 1) {
    group_draws_[0] = degree;
  } else {
    std::vector<int> remaining(members_.size());
    for (std::size_t g = 0; g < members_.size(); ++g) remaining[g] = static_cast<int>(members_[g].size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int d = 0; d < degree; ++d) {
      double total = 0.0;
      for (std::size_t g = 0; g < remaining.size(); ++g) {
        total += (layer_weighting_ ? weights[g] : 1.0) * remaining[g];
      }
      double u = unit(rng_) * total;
      std::size_t pick = remaining.size();
      for (std::size_t g = 0; g < remaining.size(); ++g) {
        if (remaining[g] == 0) continue;
        pick = g;
        u -= (layer_weighting_ ? weights[g] : 1.0) * remaining[g];
        if (u < 0.0) break;
      }
      --remaining[pick];
      ++group_draws_[pick];
    }
  }

  // Within a layer all symbols weigh the same, so the chosen subset is uniform:
  // partial Fisher-Yates over the layer's eligible list.
  out.clear();
  for (std::size_t g = 0; g < members_.size(); ++g) {
    auto& group = members_[g];
    const std::size_t n = group.size();
    for (int t = 0; t < group_draws_[g]; ++t) {
      std::uniform_int_distribution<std::size_t> slot(static_cast<std::size_t>(t), n - 1);
      const std::size_t s = slot(rng_);
      std::swap(group[static_cast<std::size_t>(t)], group[s]);
      position_[group[static_cast<std::size_t>(t)]] = t;
      position_[group[s]] = static_cast<std::int32_t>(s);
      out.push_back(group[static_cast<std::size_t>(t)]);
    }
  }
}

OutputSymbol Encoder::next() {
  if (eligible_count_ == 0) throw StateError("Encoder::next: no eligible input symbols left");
  const int degree = std::min((*sampler_)(rng_), eligible_count_);
  OutputSymbol sym;
  sym.sequence_number = sequence_++;
  choose_neighbors(degree, sym.neighbors);
  sym.payload.assign(block_->width(), 0);
  for (std::uint32_t idx : sym.neighbors) simd::xor_into(sym.payload, block_->symbol(idx));
  return sym;
}

}  // namespace ltfb
