#include "ltfb/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace ltfb {

void ChannelParams::validate() const {
  if (!(ser >= 0.0 && ser <= 1.0)) throw std::domain_error("channel: SER must lie in [0, 1]");
}

std::string_view to_string(DeadlineBasis basis) {
  return basis == DeadlineBasis::sent ? "sent" : "received";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : counters) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

void TrialConfig::validate() const {
  rsd().validate();
  if (width < 1) throw std::domain_error("trial: symbol width must be at least one byte");
  channel.validate();
  if (layers) {
    layers->validate();
    if (layers->total() != k) throw std::domain_error("trial: layer sizes must sum to k");
  }
  if (policy.kind == FeedbackKind::layer_ack && (!layers || layers->count() < 2)) {
    throw std::domain_error("trial: layer ACK requires a layered block");
  }
  if (deadline && *deadline < 0) throw std::domain_error("trial: deadline must be nonnegative");
  if (!deadline && channel.ser >= 1.0) {
    throw std::domain_error("trial: SER = 1 never delivers a symbol; set a deadline");
  }
  if (schedule && schedule->k() != k) throw std::domain_error("trial: schedule built for a different k");
}

int TransmissionTrace::total_undecoded_at(std::size_t record) const {
  int total = 0;
  for (int g = 0; g < layers(); ++g) total += undecoded_at(record, g);
  return total;
}

int TransmissionTrace::decoded_layers() const {
  int z = 0;
  while (z < layers() && layer_completion[static_cast<std::size_t>(z)].has_value()) ++z;
  return z;
}

std::optional<double> TransmissionTrace::overhead() const {
  if (!completion) return std::nullopt;
  return static_cast<double>(*completion) / k - 1.0;
}

TransmissionTrace run_trial(const TrialConfig& config) {
  config.validate();
  auto schedule = config.schedule;
  if (!schedule) {
    schedule = (config.policy.kind == FeedbackKind::per_symbol_ack &&
                config.policy.mode == DistributionMode::adaptive)
                   ? DistributionSchedule::adaptive(config.rsd())
                   : DistributionSchedule::robust_soliton(config.rsd());
  }

  Rng data_rng(derive_seed(config.seed, {0}));
  const InputBlock block = InputBlock::random(config.k, config.width, data_rng, config.layers);
  Encoder encoder(block, schedule->at(config.k), derive_seed(config.seed, {1}));
  Decoder decoder(config.k, config.width, config.layers);
  FeedbackController feedback(config.policy, schedule);
  Rng channel_rng(derive_seed(config.seed, {2}));
  std::bernoulli_distribution erased(config.channel.ser);

  TransmissionTrace trace;
  trace.k = config.k;
  trace.layer_sizes = decoder.layers().layer_sizes;
  trace.layer_completion.assign(trace.layer_sizes.size(), std::nullopt);

  auto deadline_hit = [&] {
    if (!config.deadline) return false;
    const std::int64_t used = config.deadline_basis == DeadlineBasis::sent ? trace.sent : trace.received;
    return used >= *config.deadline;
  };

  while (!decoder.is_complete() && !deadline_hit()) {
    const OutputSymbol sym = encoder.next();
    ++trace.sent;
    if (erased(channel_rng)) continue;
    ++trace.received;
    const ReceiveResult res = decoder.receive(sym);
    trace.records.push_back({trace.sent, trace.received, res.reduced_degree});
    const auto per_layer = decoder.undecoded_per_layer();
    trace.undecoded.insert(trace.undecoded.end(), per_layer.begin(), per_layer.end());
    for (std::size_t g = 0; g < per_layer.size(); ++g) {
      if (per_layer[g] == 0 && !trace.layer_completion[g]) trace.layer_completion[g] = trace.received;
    }
    if (config.policy.kind != FeedbackKind::none) feedback.apply(encoder, DecoderSnapshot::of(decoder));
  }
  if (decoder.is_complete()) trace.completion = trace.received;
  trace.layer_acks = feedback.layer_acks();

  for (std::uint32_t idx : decoder.decode_order()) {
    const auto got = decoder.value(idx);
    const auto want = block.symbol(idx);
    if (!std::equal(got.begin(), got.end(), want.begin(), want.end())) ++trace.payload_mismatches;
  }
  return trace;
}

RateDistortionModel RateDistortionModel::single_layer() { return RateDistortionModel{}; }

RateDistortionModel RateDistortionModel::two_layer(double alpha) {
  RateDistortionModel m;
  m.layer_fractions = {alpha, 1.0 - alpha};
  m.validate();
  return m;
}

void RateDistortionModel::validate() const {
  if (layer_fractions.empty()) throw std::domain_error("rate model: at least one layer");
  double sum = 0.0;
  for (double f : layer_fractions) {
    if (!(f > 0.0)) throw std::domain_error("rate model: layer fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("rate model: layer fractions must sum to 1");
  if (!(bitrate > 0.0 && width > 0.0 && height > 0.0 && fps > 0.0)) {
    throw std::domain_error("rate model: bitrate and geometry must be positive");
  }
}

double RateDistortionModel::rate(int decoded_layers) const {
  if (decoded_layers < 0 || decoded_layers > static_cast<int>(layer_fractions.size())) {
    throw std::domain_error("rate model: decoded layer count out of range");
  }
  const double fraction =
      std::accumulate(layer_fractions.begin(), layer_fractions.begin() + decoded_layers, 0.0);
  return fraction * bitrate / (width * height * fps);
}

double RateDistortionModel::distortion(int decoded_layers) const {
  return std::exp2(-2.0 * rate(decoded_layers));
}

double distortion_of_trace(const TransmissionTrace& trace, const RateDistortionModel& model) {
  if (static_cast<std::size_t>(trace.layers()) != model.layer_fractions.size()) {
    throw std::domain_error("distortion: trace and rate model disagree on the number of layers");
  }
  return model.distortion(trace.decoded_layers());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ltfb
