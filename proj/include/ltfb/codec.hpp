#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ltfb/degree.hpp"
#include "ltfb/layered.hpp"

namespace ltfb {

/// Raised when an encoder or decoder is driven in a state that cannot serve
/// the request (e.g. encoding with nothing left to encode).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// k source symbols of `width` bytes each, optionally partitioned into
/// contiguous layers (most important first).
class InputBlock {
 public:
  InputBlock(int k, std::size_t width, std::vector<std::uint8_t> data,
             std::optional<LayerConfig> layers = std::nullopt);

  /// Block filled with bytes drawn from `rng`.
  static InputBlock random(int k, std::size_t width, Rng& rng,
                           std::optional<LayerConfig> layers = std::nullopt);

  int k() const { return k_; }
  std::size_t width() const { return width_; }
  std::span<const std::uint8_t> symbol(std::uint32_t index) const {
    return {data_.data() + static_cast<std::size_t>(index) * width_, width_};
  }
  bool layered() const { return layers_.has_value(); }
  /// The layer split; a single layer when the block is not layered.
  const LayerConfig& layers() const { return effective_layers_; }
  int layer_of(std::uint32_t index) const { return layer_of_[index]; }

 private:
  int k_;
  std::size_t width_;
  std::vector<std::uint8_t> data_;
  std::optional<LayerConfig> layers_;
  LayerConfig effective_layers_;
  std::vector<int> layer_of_;
};

struct OutputSymbol {
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint8_t> payload;
  std::uint64_t sequence_number = 0;

  int degree() const { return static_cast<int>(neighbors.size()); }
};

/// LT encoder over a fixed block. Neighbours are drawn from the eligible set
/// (all symbols until feedback removes some); on a layered block each draw
/// favours layers by their weights, otherwise selection is uniform.
class Encoder {
 public:
  Encoder(const InputBlock& block, std::shared_ptr<const DegreeSampler> sampler, std::uint64_t seed);
  Encoder(const InputBlock& block, const DegreeDistribution& dist, std::uint64_t seed);

  /// Next output symbol. The sampled degree is clamped to the eligible count.
  OutputSymbol next();

  const InputBlock& block() const { return *block_; }
  const DegreeDistribution& distribution() const { return sampler_->distribution(); }
  void set_sampler(std::shared_ptr<const DegreeSampler> sampler);

  int eligible_count() const { return eligible_count_; }
  bool is_eligible(std::uint32_t index) const { return position_[index] >= 0; }
  int eligible_in_layer(int layer) const {
    return static_cast<int>(members_[static_cast<std::size_t>(layer)].size());
  }
  /// Removes `index` from future encoding; no-op if already excluded.
  void exclude(std::uint32_t index);
  /// When false every eligible symbol is equally likely regardless of layer.
  void set_layer_weighting(bool on) { layer_weighting_ = on; }
  bool layer_weighting() const { return layer_weighting_; }
  std::uint64_t emitted() const { return sequence_; }

 private:
  void choose_neighbors(int degree, std::vector<std::uint32_t>& out);

  const InputBlock* block_;
  std::shared_ptr<const DegreeSampler> sampler_;
  Rng rng_;
  std::vector<std::vector<std::uint32_t>> members_;  // eligible indices per layer
  std::vector<std::int32_t> position_;                // slot within members_, -1 if excluded
  int eligible_count_ = 0;
  bool layer_weighting_ = true;
  std::uint64_t sequence_ = 0;
  std::vector<int> group_draws_;
};

struct ReceiveResult {
  int reduced_degree = 0;  // degree after stripping decoded neighbours
  int newly_decoded = 0;
};

/// Belief-propagation (peeling) decoder. Incoming symbols are stripped of
/// already-recovered neighbours; degree-one symbols go to a FIFO ripple that
/// is processed until empty, releasing buffered symbols as they drop to
/// degree one.
class Decoder {
 public:
  Decoder(int k, std::size_t width, std::optional<LayerConfig> layers = std::nullopt);

  ReceiveResult receive(const OutputSymbol& symbol);

  bool is_complete() const { return undecoded_ == 0; }
  bool layer_complete(int layer) const { return undecoded_per_layer_[static_cast<std::size_t>(layer)] == 0; }
  std::vector<bool> layer_flags() const;

  int k() const { return k_; }
  int undecoded() const { return undecoded_; }
  std::span<const int> undecoded_per_layer() const { return undecoded_per_layer_; }
  const LayerConfig& layers() const { return layers_; }
  /// Recovered indices in the order they were decoded.
  std::span<const std::uint32_t> decode_order() const { return decode_order_; }
  bool is_decoded(std::uint32_t index) const { return decoded_[index]; }
  std::span<const std::uint8_t> value(std::uint32_t index) const;

  /// Symbols still holding two or more unknown neighbours.
  std::size_t buffered() const { return buffered_; }
  std::size_t ripple_size() const { return ripple_.size(); }
  std::uint64_t received() const { return received_; }
  std::uint64_t redundant() const { return redundant_; }

  /// Recomputes the structural invariants; throws StateError on violation.
  void check_invariants() const;

 private:
  struct Pending {
    std::vector<std::uint32_t> unknown;
    std::size_t payload_offset = 0;
  };

  void decode_from(std::size_t pending_id);
  std::span<std::uint8_t> pending_payload(std::size_t id) {
    return {pool_.data() + pending_[id].payload_offset, width_};
  }

  int k_;
  std::size_t width_;
  LayerConfig layers_;
  std::vector<int> layer_of_;
  std::vector<bool> decoded_;
  std::vector<std::uint8_t> values_;
  std::vector<std::uint32_t> decode_order_;
  std::vector<int> undecoded_per_layer_;
  int undecoded_;

  std::vector<Pending> pending_;
  std::vector<std::uint8_t> pool_;
  std::vector<std::vector<std::uint32_t>> adjacency_;  // input index -> pending ids
  std::deque<std::size_t> ripple_;
  std::size_t buffered_ = 0;
  std::uint64_t received_ = 0;
  std::uint64_t redundant_ = 0;
  std::vector<std::uint8_t> scratch_;
};

}  // namespace ltfb
