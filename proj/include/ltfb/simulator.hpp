#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltfb/feedback.hpp"
#include "ltfb/layered.hpp"

namespace ltfb {

/// Memoryless symbol erasure channel.
struct ChannelParams {
  double ser = 0.0;
  void validate() const;
};

enum class DeadlineBasis { sent, received };

std::string_view to_string(DeadlineBasis basis);

/// Derives an independent 64-bit seed from a master seed and a list of
/// counters (splitmix64 chained over the inputs).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters);

struct TrialConfig {
  int k = 100;
  std::size_t width = 8;
  double c = 0.1;
  double delta = 1.0;
  std::optional<LayerConfig> layers;
  FeedbackPolicy policy;
  ChannelParams channel;
  std::optional<std::int64_t> deadline;  // in units of `deadline_basis`
  DeadlineBasis deadline_basis = DeadlineBasis::sent;
  std::uint64_t seed = 0;
  /// Prebuilt encoder distributions; built from (k, c, delta, policy) when null.
  std::shared_ptr<const DistributionSchedule> schedule;

  RsdParams rsd() const { return RsdParams{k, c, delta}; }
  void validate() const;
};

/// One row per received symbol.
struct TraceRecord {
  std::int64_t sent = 0;
  std::int64_t received = 0;
  int reduced_degree = 0;
  bool redundant() const { return reduced_degree == 0; }
};

struct TransmissionTrace {
  int k = 0;
  std::vector<int> layer_sizes;
  std::vector<TraceRecord> records;
  std::vector<int> undecoded;  // records.size() x layers, row-major
  /// Received count at which each layer finished, if it did.
  std::vector<std::optional<std::int64_t>> layer_completion;
  std::optional<std::int64_t> completion;  // received count at full decode
  std::int64_t sent = 0;
  std::int64_t received = 0;
  std::int64_t payload_mismatches = 0;  // decoded values differing from the source
  int layer_acks = 0;

  int layers() const { return static_cast<int>(layer_sizes.size()); }
  int undecoded_at(std::size_t record, int layer) const {
    return undecoded[record * layer_sizes.size() + static_cast<std::size_t>(layer)];
  }
  int total_undecoded_at(std::size_t record) const;
  bool complete() const { return completion.has_value(); }
  /// Leading layers (in priority order) fully decoded at the end of the trace.
  int decoded_layers() const;
  /// received_at_completion / k - 1; empty if never completed.
  std::optional<double> overhead() const;
};

TransmissionTrace run_trial(const TrialConfig& config);

/// Source-coding model: d(r) = 2^(-2r), where decoding z layers yields rate
/// r_z = (sum of the first z layer fractions) * bitrate / (width*height*fps).
struct RateDistortionModel {
  std::vector<double> layer_fractions{1.0};
  double bitrate = 1e6;
  double width = 480;
  double height = 320;
  double fps = 30;

  static RateDistortionModel single_layer();
  static RateDistortionModel two_layer(double alpha);

  double rate(int decoded_layers) const;
  double distortion(int decoded_layers) const;
  void validate() const;
};

double distortion_of_trace(const TransmissionTrace& trace, const RateDistortionModel& model);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. fn must only touch
/// per-index state.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// --- Experiments ---------------------------------------------------------

struct SchemeSummary {
  std::string name;
  /// curves[layer][x]: mean undecoded fraction of the layer after x received
  /// symbols; one curve when the scheme is single-layer.
  std::vector<std::vector<double>> curves;
  std::vector<double> overheads;  // per run
  double mean_overhead = 0.0;
  double overhead_stddev = 0.0;
  /// Fraction of runs in which layer 0 finished strictly before the last layer.
  double base_first_fraction = 0.0;
  double mean_layer_acks = 0.0;
  std::int64_t payload_mismatches = 0;
  std::int64_t redundant_receptions = 0;
  std::int64_t receptions = 0;
};

struct SingleLayerExperiment {
  int k = 1000;
  double c = 0.1;
  double delta = 1.0;
  std::size_t width = 8;
  int runs = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// No feedback, per-symbol ACK with the RSD, and per-symbol ACK with the
/// adaptive distribution, in that order.
std::vector<SchemeSummary> experiment_single_layer(const SingleLayerExperiment& cfg);

struct TwoLayerExperiment {
  int k = 1000;
  double c = 0.1;
  double delta = 1.0;
  double alpha = 0.5;
  double beta = 9.0;
  std::size_t width = 8;
  int runs = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool with_layer_ack = true;
  bool without_ack = true;
  bool single_layer_baseline = true;
  bool reparameterize_after_layer_ack = true;
};

/// Two-layer code with a layer ACK, without ACK, and the single-layer
/// baseline (those enabled), in that order.
std::vector<SchemeSummary> experiment_two_layer(const TwoLayerExperiment& cfg);

struct DistortionExperiment {
  int k = 100;
  double c = 0.1;
  double delta = 1.0;
  double alpha = 0.5;
  double beta = 9.0;
  std::size_t width = 8;
  std::vector<double> ser_grid;
  int seconds = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  DeadlineBasis deadline_basis = DeadlineBasis::sent;
  bool reparameterize_after_layer_ack = true;
  RateDistortionModel model;  // layer_fractions ignored; derived from alpha
};

struct DistortionPoint {
  double ser = 0.0;
  std::vector<double> mean;    // per scheme
  std::vector<double> standard_error;  // per scheme
};

struct DistortionResult {
  std::vector<std::string> schemes;  // single_layer, two_layer, two_layer_ack
  std::vector<DistortionPoint> points;
  std::int64_t payload_mismatches = 0;
};

DistortionResult experiment_distortion(const DistortionExperiment& cfg);

}  // namespace ltfb
