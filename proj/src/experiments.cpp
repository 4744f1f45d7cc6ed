#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltfb/simulator.hpp"

namespace ltfb {

namespace {

struct TrialDigest {
  std::vector<std::vector<double>> curves;  // per layer, index = received count
  std::optional<double> overhead;
  bool base_first = false;
  int layer_acks = 0;
  std::int64_t mismatches = 0;
  std::int64_t redundant = 0;
  std::int64_t receptions = 0;
};

TrialDigest digest(const TransmissionTrace& trace) {
  TrialDigest d;
  const int layers = trace.layers();
  d.curves.resize(static_cast<std::size_t>(layers));
  for (int g = 0; g < layers; ++g) {
    auto& curve = d.curves[static_cast<std::size_t>(g)];
    const double size = trace.layer_sizes[static_cast<std::size_t>(g)];
    curve.reserve(trace.records.size() + 1);
    curve.push_back(1.0);
    for (std::size_t r = 0; r < trace.records.size(); ++r) curve.push_back(trace.undecoded_at(r, g) / size);
  }
  d.overhead = trace.overhead();
  if (layers > 1) {
    const auto& base = trace.layer_completion.front();
    const auto& last = trace.layer_completion.back();
    d.base_first = base && (!last || *base < *last);
  }
  d.layer_acks = trace.layer_acks;
  d.mismatches = trace.payload_mismatches;
  for (const auto& rec : trace.records) d.redundant += rec.redundant() ? 1 : 0;
  d.receptions = static_cast<std::int64_t>(trace.records.size());
  return d;
}

// Deterministic reduction in run order.
SchemeSummary summarize(std::string name, const std::vector<TrialDigest>& digests) {
  SchemeSummary s;
  s.name = std::move(name);
  if (digests.empty()) return s;
  const std::size_t layers = digests.front().curves.size();
  std::size_t length = 0;
  for (const auto& d : digests) {
    for (const auto& c : d.curves) length = std::max(length, c.size());
  }
  s.curves.assign(layers, std::vector<double>(length, 0.0));
  for (const auto& d : digests) {
    for (std::size_t g = 0; g < layers; ++g) {
      const auto& c = d.curves[g];
      for (std::size_t x = 0; x < length; ++x) s.curves[g][x] += x < c.size() ? c[x] : c.back();
    }
    if (d.overhead) s.overheads.push_back(*d.overhead);
    s.base_first_fraction += d.base_first ? 1.0 : 0.0;
    s.mean_layer_acks += d.layer_acks;
    s.payload_mismatches += d.mismatches;
    s.redundant_receptions += d.redundant;
    s.receptions += d.receptions;
  }
  const double runs = static_cast<double>(digests.size());
  for (auto& curve : s.curves) {
    for (double& v : curve) v /= runs;
  }
  s.base_first_fraction /= runs;
  s.mean_layer_acks /= runs;
  if (!s.overheads.empty()) {
    double sum = 0.0;
    for (double o : s.overheads) sum += o;
    s.mean_overhead = sum / static_cast<double>(s.overheads.size());
    double ss = 0.0;
    for (double o : s.overheads) ss += (o - s.mean_overhead) * (o - s.mean_overhead);
    s.overhead_stddev = s.overheads.size() > 1 ? std::sqrt(ss / static_cast<double>(s.overheads.size() - 1)) : 0.0;
  }
  return s;
}

SchemeSummary run_scheme(std::string name, const TrialConfig& base, int runs, std::uint64_t master, int threads) {
  if (runs < 1) throw std::domain_error("experiment: runs must be positive");
  std::vector<TrialDigest> digests(static_cast<std::size_t>(runs));
  parallel_for(digests.size(), threads, [&](std::size_t run) {
    TrialConfig cfg = base;
    cfg.seed = derive_seed(master, {run});
    digests[run] = digest(run_trial(cfg));
  });
  return summarize(std::move(name), digests);
}

}  // namespace

std::vector<SchemeSummary> experiment_single_layer(const SingleLayerExperiment& cfg) {
  const RsdParams rsd{cfg.k, cfg.c, cfg.delta};
  TrialConfig base;
  base.k = cfg.k;
  base.c = cfg.c;
  base.delta = cfg.delta;
  base.width = cfg.width;
  base.validate();

  auto rsd_schedule = DistributionSchedule::robust_soliton(rsd);
  auto adaptive_schedule = DistributionSchedule::adaptive(rsd);

  std::vector<SchemeSummary> out;
  TrialConfig none = base;
  none.schedule = rsd_schedule;
  out.push_back(run_scheme("no_feedback", none, cfg.runs, cfg.seed, cfg.threads));

  TrialConfig ack = base;
  ack.policy = {FeedbackKind::per_symbol_ack, DistributionMode::original};
  ack.schedule = rsd_schedule;
  out.push_back(run_scheme("ack_original", ack, cfg.runs, cfg.seed, cfg.threads));

  TrialConfig adaptive = base;
  adaptive.policy = {FeedbackKind::per_symbol_ack, DistributionMode::adaptive};
  adaptive.schedule = adaptive_schedule;
  out.push_back(run_scheme("ack_adaptive", adaptive, cfg.runs, cfg.seed, cfg.threads));
  return out;
}

std::vector<SchemeSummary> experiment_two_layer(const TwoLayerExperiment& cfg) {
  const RsdParams rsd{cfg.k, cfg.c, cfg.delta};
  const LayerConfig layers = LayerConfig::two_layer(cfg.k, cfg.alpha, cfg.beta);
  auto schedule = DistributionSchedule::robust_soliton(rsd);

  TrialConfig base;
  base.k = cfg.k;
  base.c = cfg.c;
  base.delta = cfg.delta;
  base.width = cfg.width;
  base.schedule = schedule;
  base.layers = layers;
  base.validate();

  std::vector<SchemeSummary> out;
  if (cfg.with_layer_ack) {
    TrialConfig ack = base;
    ack.policy.kind = FeedbackKind::layer_ack;
    ack.policy.reparameterize_after_layer_ack = cfg.reparameterize_after_layer_ack;
    out.push_back(run_scheme("two_layer_ack", ack, cfg.runs, cfg.seed, cfg.threads));
  }
  if (cfg.without_ack) out.push_back(run_scheme("two_layer", base, cfg.runs, cfg.seed, cfg.threads));
  if (cfg.single_layer_baseline) {
    TrialConfig single = base;
    single.layers.reset();
    out.push_back(run_scheme("single_layer", single, cfg.runs, cfg.seed, cfg.threads));
  }
  return out;
}

DistortionResult experiment_distortion(const DistortionExperiment& cfg) {
  if (cfg.seconds < 1) throw std::domain_error("distortion experiment: seconds must be positive");
  if (cfg.ser_grid.empty()) throw std::domain_error("distortion experiment: empty SER grid");
  const RsdParams rsd{cfg.k, cfg.c, cfg.delta};
  const LayerConfig layers = LayerConfig::two_layer(cfg.k, cfg.alpha, cfg.beta);
  auto schedule = DistributionSchedule::robust_soliton(rsd);

  RateDistortionModel single_model = cfg.model;
  single_model.layer_fractions = {1.0};
  single_model.validate();
  RateDistortionModel layered_model = cfg.model;
  layered_model.layer_fractions = {static_cast<double>(layers.layer_sizes[0]) / cfg.k,
                                   static_cast<double>(layers.layer_sizes[1]) / cfg.k};
  layered_model.validate();

  TrialConfig base;
  base.k = cfg.k;
  base.c = cfg.c;
  base.delta = cfg.delta;
  base.width = cfg.width;
  base.schedule = schedule;
  base.deadline = 2 * static_cast<std::int64_t>(cfg.k);
  base.deadline_basis = cfg.deadline_basis;

  struct Scheme {
    std::string name;
    TrialConfig config;
    const RateDistortionModel* model;
  };
  std::vector<Scheme> schemes;
  schemes.push_back({"single_layer", base, &single_model});
  TrialConfig two = base;
  two.layers = layers;
  schemes.push_back({"two_layer", two, &layered_model});
  TrialConfig two_ack = two;
  two_ack.policy.kind = FeedbackKind::layer_ack;
  two_ack.policy.reparameterize_after_layer_ack = cfg.reparameterize_after_layer_ack;
  schemes.push_back({"two_layer_ack", two_ack, &layered_model});

  for (double ser : cfg.ser_grid) {
    if (!(ser >= 0.0 && ser <= 1.0)) throw std::domain_error("distortion experiment: SER must lie in [0, 1]");
  }
  for (auto& s : schemes) s.config.validate();

  DistortionResult result;
  for (const auto& s : schemes) result.schemes.push_back(s.name);

  const std::size_t trials = static_cast<std::size_t>(cfg.seconds);
  const std::size_t jobs = cfg.ser_grid.size() * schemes.size() * trials;
  std::vector<double> distortion(jobs);
  std::vector<std::int64_t> mismatches(jobs);
  parallel_for(jobs, cfg.threads, [&](std::size_t job) {
    const std::size_t trial = job % trials;
    const std::size_t scheme = (job / trials) % schemes.size();
    const std::size_t point = job / (trials * schemes.size());
    TrialConfig tc = schemes[scheme].config;
    tc.channel.ser = cfg.ser_grid[point];
    tc.seed = derive_seed(cfg.seed, {point, trial});
    const TransmissionTrace trace = run_trial(tc);
    distortion[job] = distortion_of_trace(trace, *schemes[scheme].model);
    mismatches[job] = trace.payload_mismatches;
  });

  for (std::size_t point = 0; point < cfg.ser_grid.size(); ++point) {
    DistortionPoint p;
    p.ser = cfg.ser_grid[point];
    for (std::size_t scheme = 0; scheme < schemes.size(); ++scheme) {
      const std::size_t first = (point * schemes.size() + scheme) * trials;
      // Shifted by the first value so that constant samples give exactly zero spread.
      const double shift = distortion[first];
      double sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) sum += distortion[first + t] - shift;
      const double offset = sum / static_cast<double>(trials);
      const double mean = shift + offset;
      double ss = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double dev = distortion[first + t] - shift - offset;
        ss += dev * dev;
      }
      const double se = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
      p.mean.push_back(mean);
      p.standard_error.push_back(se);
    }
    result.points.push_back(std::move(p));
  }
  for (auto m : mismatches) result.payload_mismatches += m;
  return result;
}

}  // namespace ltfb
