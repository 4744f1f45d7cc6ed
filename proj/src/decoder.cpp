#include <algorithm>
#include <stdexcept>
#include <string>

#include "ltfb/codec.hpp"
#include "ltfb/simd/kernels.hpp"

namespace ltfb {

Decoder::Decoder(int k, std::size_t width, std::optional<LayerConfig> layers)
    : k_(k), width_(width), undecoded_(k) {
  if (k_ < 1) throw std::domain_error("Decoder: k must be positive");
  if (width_ < 1) throw std::domain_error("Decoder: symbol width must be at least one byte");
  layers_ = layers ? *layers : LayerConfig::single(k);
  layers_.validate();
  if (layers_.total() != k) throw std::domain_error("Decoder: layer sizes must sum to k");
  for (int layer = 0; layer < layers_.count(); ++layer) {
    layer_of_.insert(layer_of_.end(), static_cast<std::size_t>(layers_.layer_sizes[static_cast<std::size_t>(layer)]), layer);
  }
  undecoded_per_layer_ = layers_.layer_sizes;
  decoded_.assign(static_cast<std::size_t>(k), false);
  values_.assign(static_cast<std::size_t>(k) * width_, 0);
  adjacency_.resize(static_cast<std::size_t>(k));
  scratch_.resize(width_);
}

std::vector<bool> Decoder::layer_flags() const {
  std::vector<bool> flags(undecoded_per_layer_.size());
  for (std::size_t g = 0; g < flags.size(); ++g) flags[g] = undecoded_per_layer_[g] == 0;
  return flags;
}

std::span<const std::uint8_t> Decoder::value(std::uint32_t index) const {
  if (index >= decoded_.size() || !decoded_[index]) {
    throw StateError("Decoder::value: symbol " + std::to_string(index) + " not decoded");
  }
  return {values_.data() + static_cast<std::size_t>(index) * width_, width_};
}

ReceiveResult Decoder::receive(const OutputSymbol& symbol) {
  if (symbol.payload.size() != width_) throw std::domain_error("Decoder::receive: payload width mismatch");
  for (std::size_t a = 0; a < symbol.neighbors.size(); ++a) {
    if (symbol.neighbors[a] >= static_cast<std::uint32_t>(k_)) {
      throw std::domain_error("Decoder::receive: neighbour " + std::to_string(symbol.neighbors[a]) +
                              " outside the block");
    }
  }
  {
    auto sorted = symbol.neighbors;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::domain_error("Decoder::receive: repeated neighbour index");
    }
  }
  ++received_;

  // Strip neighbours that are already known.
  std::copy(symbol.payload.begin(), symbol.payload.end(), scratch_.begin());
  Pending pending;
  for (std::uint32_t n : symbol.neighbors) {
    if (decoded_[n]) {
      simd::xor_into(scratch_, value(n));
    } else {
      pending.unknown.push_back(n);
    }
  }
  ReceiveResult result;
  result.reduced_degree = static_cast<int>(pending.unknown.size());
  if (pending.unknown.empty()) {
    ++redundant_;
    return result;
  }

  pending.payload_offset = pool_.size();
  pool_.insert(pool_.end(), scratch_.begin(), scratch_.end());
  const std::size_t id = pending_.size();
  for (std::uint32_t n : pending.unknown) adjacency_[n].push_back(static_cast<std::uint32_t>(id));
  pending_.push_back(std::move(pending));

  if (result.reduced_degree == 1) {
    ripple_.push_back(id);
  } else {
    ++buffered_;
  }

  const int before = undecoded_;
  while (!ripple_.empty()) {
    const std::size_t next = ripple_.front();
    ripple_.pop_front();
    // Another ripple entry may already have recovered the same symbol.
    if (pending_[next].unknown.size() == 1) decode_from(next);
  }
  result.newly_decoded = before - undecoded_;
  return result;
}

void Decoder::decode_from(std::size_t pending_id) {
  const std::uint32_t target = pending_[pending_id].unknown.front();
  auto out = std::span<std::uint8_t>(values_.data() + static_cast<std::size_t>(target) * width_, width_);
  const auto src = pending_payload(pending_id);
  std::copy(src.begin(), src.end(), out.begin());
  decoded_[target] = true;
  decode_order_.push_back(target);
  --undecoded_;
  --undecoded_per_layer_[static_cast<std::size_t>(layer_of_[target])];

  // Process: remove the recovered value from every symbol that references it.
  for (std::uint32_t other : adjacency_[target]) {
    auto& p = pending_[other];
    const std::size_t before = p.unknown.size();
    auto it = std::find(p.unknown.begin(), p.unknown.end(), target);
    *it = p.unknown.back();
    p.unknown.pop_back();
    simd::xor_into(pending_payload(other), out);
    if (before == 2) {
      --buffered_;
      ripple_.push_back(other);  // release
    }
  }
  adjacency_[target].clear();
  adjacency_[target].shrink_to_fit();
}

void Decoder::check_invariants() const {
  if (!ripple_.empty()) throw StateError("ripple not drained");
  std::size_t buffered = 0;
  for (const auto& p : pending_) {
    if (p.unknown.size() == 1) throw StateError("degree-one symbol left outside the ripple");
    if (p.unknown.size() >= 2) ++buffered;
    for (std::uint32_t n : p.unknown) {
      if (decoded_[n]) throw StateError("buffered symbol references decoded input " + std::to_string(n));
    }
  }
  if (buffered != buffered_) throw StateError("buffer count out of sync");
  std::vector<int> per_layer = layers_.layer_sizes;
  int total = k_;
  for (std::size_t i = 0; i < decoded_.size(); ++i) {
    if (decoded_[i]) {
      --per_layer[static_cast<std::size_t>(layer_of_[i])];
      --total;
    }
  }
  if (per_layer != undecoded_per_layer_ || total != undecoded_) {
    throw StateError("undecoded counters inconsistent with decoded set");
  }
}

}  // namespace ltfb
