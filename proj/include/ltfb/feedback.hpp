#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include "ltfb/codec.hpp"
#include "ltfb/degree.hpp"

namespace ltfb {

enum class FeedbackKind { none, per_symbol_ack, layer_ack };

/// Which encoder distribution follows a per-symbol ACK.
enum class DistributionMode {
  original,  // Robust Soliton re-parameterized over the k' = k - M remaining symbols
  adaptive,  // the adaptive distribution over the L = k' undecoded symbols
};

struct FeedbackPolicy {
  FeedbackKind kind = FeedbackKind::none;
  DistributionMode mode = DistributionMode::original;
  /// After a layer ACK, switch to the RSD over the remaining symbols (true) or
  /// keep the full-block distribution, with degrees clamped (false).
  bool reparameterize_after_layer_ack = true;
};

std::string_view to_string(FeedbackKind kind);
std::string_view to_string(DistributionMode mode);

/// Encoder degree distribution as a function of the number of symbols still
/// eligible for encoding. Entries are built on first request and shared; safe
/// to query from several threads.
class DistributionSchedule {
 public:
  /// RSD(k', c, delta) for every k' in 1..k.
  static std::shared_ptr<const DistributionSchedule> robust_soliton(const RsdParams& full);
  /// Adaptive distribution over L undecoded symbols, derived from RSD(k).
  static std::shared_ptr<const DistributionSchedule> adaptive(const RsdParams& full);

  std::shared_ptr<const DegreeSampler> at(int eligible) const;
  int k() const { return full_.k; }
  DistributionMode mode() const { return mode_; }

 private:
  DistributionSchedule(const RsdParams& full, DistributionMode mode);

  RsdParams full_;
  DistributionMode mode_;
  DegreeDistribution base_;
  mutable std::vector<std::shared_ptr<const DegreeSampler>> cache_;
  mutable std::unique_ptr<std::once_flag[]> built_;
};

/// What the receiver has told the sender: the recovered indices in decode
/// order and which layers are complete.
struct DecoderSnapshot {
  std::span<const std::uint32_t> decoded;
  std::vector<bool> layer_complete;

  static DecoderSnapshot of(const Decoder& decoder);
};

/// Applies a feedback policy to one encoder over a transmission. Keeps track
/// of what has already been acknowledged so that each snapshot only costs the
/// newly decoded symbols.
class FeedbackController {
 public:
  FeedbackController(FeedbackPolicy policy, std::shared_ptr<const DistributionSchedule> schedule);

  void apply(Encoder& encoder, const DecoderSnapshot& snapshot);

  const FeedbackPolicy& policy() const { return policy_; }
  int acknowledged() const { return acknowledged_; }
  /// Number of layer ACK messages sent so far.
  int layer_acks() const { return layer_acks_; }

 private:
  void refresh_distribution(Encoder& encoder);

  FeedbackPolicy policy_;
  std::shared_ptr<const DistributionSchedule> schedule_;
  std::size_t consumed_ = 0;
  int acknowledged_ = 0;
  int layer_acks_ = 0;
  std::vector<bool> layer_acked_;
  int last_eligible_ = -1;
};

/// One-shot form: brings `encoder` in line with `snapshot` under `policy`.
void apply_feedback(Encoder& encoder, const DecoderSnapshot& snapshot, const FeedbackPolicy& policy,
                    std::shared_ptr<const DistributionSchedule> schedule);

}  // namespace ltfb
