#include "ltfb/feedback.hpp"

#include <stdexcept>
#include <string>

namespace ltfb {

std::string_view to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::none:
      return "none";
    case FeedbackKind::per_symbol_ack:
      return "per_symbol_ack";
    case FeedbackKind::layer_ack:
      return "layer_ack";
  }
  return "unknown";
}

std::string_view to_string(DistributionMode mode) {
  return mode == DistributionMode::original ? "original" : "adaptive";
}

DistributionSchedule::DistributionSchedule(const RsdParams& full, DistributionMode mode)
    : full_(full), mode_(mode), base_(ltfb::robust_soliton(full)) {
  if (mode_ == DistributionMode::original) {
    // Every re-parameterized RSD must be valid; fail now rather than mid-run.
    for (int k = 1; k <= full_.k; ++k) RsdParams{k, full_.c, full_.delta}.validate();
  }
  cache_.resize(static_cast<std::size_t>(full_.k) + 1);
  built_ = std::make_unique<std::once_flag[]>(static_cast<std::size_t>(full_.k) + 1);
}

std::shared_ptr<const DistributionSchedule> DistributionSchedule::robust_soliton(const RsdParams& full) {
  return std::shared_ptr<const DistributionSchedule>(new DistributionSchedule(full, DistributionMode::original));
}

std::shared_ptr<const DistributionSchedule> DistributionSchedule::adaptive(const RsdParams& full) {
  return std::shared_ptr<const DistributionSchedule>(new DistributionSchedule(full, DistributionMode::adaptive));
}

std::shared_ptr<const DegreeSampler> DistributionSchedule::at(int eligible) const {
  if (eligible < 1 || eligible > full_.k) {
    throw std::domain_error("DistributionSchedule: eligible count " + std::to_string(eligible) +
                            " outside [1, " + std::to_string(full_.k) + "]");
  }
  const auto slot = static_cast<std::size_t>(eligible);
  std::call_once(built_[slot], [&] {
    if (eligible == full_.k) {
      cache_[slot] = std::make_shared<const DegreeSampler>(base_);
    } else if (mode_ == DistributionMode::original) {
      cache_[slot] = std::make_shared<const DegreeSampler>(
          ltfb::robust_soliton(RsdParams{eligible, full_.c, full_.delta}));
    } else {
      cache_[slot] = std::make_shared<const DegreeSampler>(adaptive_degree_dist(base_, eligible));
    }
  });
  return cache_[slot];
}

DecoderSnapshot DecoderSnapshot::of(const Decoder& decoder) {
  return DecoderSnapshot{decoder.decode_order(), decoder.layer_flags()};
}

FeedbackController::FeedbackController(FeedbackPolicy policy,
                                       std::shared_ptr<const DistributionSchedule> schedule)
    : policy_(policy), schedule_(std::move(schedule)) {
  if (policy_.kind != FeedbackKind::none && !schedule_) {
    throw std::invalid_argument("FeedbackController: ACK policies need a distribution schedule");
  }
}

void FeedbackController::refresh_distribution(Encoder& encoder) {
  const int eligible = encoder.eligible_count();
  if (eligible == last_eligible_ || eligible == 0) return;
  last_eligible_ = eligible;
  encoder.set_sampler(schedule_->at(eligible));
}

void FeedbackController::apply(Encoder& encoder, const DecoderSnapshot& snapshot) {
  const int k = encoder.block().k();
  for (std::uint32_t idx : snapshot.decoded) {
    if (idx >= static_cast<std::uint32_t>(k)) {
      throw std::domain_error("feedback snapshot references unknown input " + std::to_string(idx));
    }
  }
  if (snapshot.layer_complete.size() != static_cast<std::size_t>(encoder.block().layers().count())) {
    throw std::domain_error("feedback snapshot has the wrong number of layer flags");
  }
  if (consumed_ > snapshot.decoded.size()) consumed_ = 0;  // fresh snapshot source

  switch (policy_.kind) {
    case FeedbackKind::none:
      break;

    case FeedbackKind::per_symbol_ack: {
      for (std::size_t i = consumed_; i < snapshot.decoded.size(); ++i) {
        if (encoder.is_eligible(snapshot.decoded[i])) {
          encoder.exclude(snapshot.decoded[i]);
          ++acknowledged_;
        }
      }
      consumed_ = snapshot.decoded.size();
      if (encoder.eligible_count() < k || last_eligible_ >= 0) refresh_distribution(encoder);
      break;
    }

    case FeedbackKind::layer_ack: {
      if (!encoder.block().layered()) throw std::domain_error("layer ACK requires a layered block");
      const auto& layers = encoder.block().layers();
      layer_acked_.resize(static_cast<std::size_t>(layers.count()), false);
      bool all_complete = true;
      for (bool done : snapshot.layer_complete) all_complete = all_complete && done;
      if (all_complete) break;  // decoding finished; nothing left to send
      for (int g = 0; g < layers.count(); ++g) {
        const auto slot = static_cast<std::size_t>(g);
        if (!snapshot.layer_complete[slot] || layer_acked_[slot]) continue;
        layer_acked_[slot] = true;
        ++layer_acks_;
        const auto first = static_cast<std::uint32_t>(layers.offset(g));
        const auto last = first + static_cast<std::uint32_t>(layers.layer_sizes[slot]);
        for (std::uint32_t idx = first; idx < last; ++idx) {
          if (encoder.is_eligible(idx)) {
            encoder.exclude(idx);
            ++acknowledged_;
          }
        }
      }
      if (policy_.reparameterize_after_layer_ack && acknowledged_ > 0) refresh_distribution(encoder);
      break;
    }
  }
}

void apply_feedback(Encoder& encoder, const DecoderSnapshot& snapshot, const FeedbackPolicy& policy,
                    std::shared_ptr<const DistributionSchedule> schedule) {
  FeedbackController(policy, std::move(schedule)).apply(encoder, snapshot);
}

}  // namespace ltfb
