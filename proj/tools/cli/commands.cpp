#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

#include "ltfb/degree.hpp"
#include "ltfb/layered.hpp"
#include "ltfb/simulator.hpp"

#ifndef LTFB_GIT_VERSION
#define LTFB_GIT_VERSION "unknown"
#endif

namespace ltfb::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// Raised for bad user input discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  void row(std::initializer_list<std::variant<double, std::string>> cells) {
    std::vector<std::string> out;
    for (const auto& c : cells) {
      out.push_back(std::holds_alternative<double>(c) ? format_number(std::get<double>(c)) : std::get<std::string>(c));
    }
    row_strings(out);
  }
  void row_values(const std::vector<double>& cells) {
    std::vector<std::string> out;
    for (double v : cells) out.push_back(format_number(v));
    row_strings(out);
  }
  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
    ++rows_;
  }

  std::size_t columns_;
  std::string text_;
  std::size_t rows_ = 0;
};

struct Output {
  std::string stem;
  std::string csv;
};

struct Context {
  std::string output_dir;
  int threads = 1;
  std::ostream* out = nullptr;
};

void write_atomically(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << contents;
    f.close();
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// Writes each CSV and its manifest; nothing is written until all results exist.
void emit(const Context& ctx, const std::string& command, const Json& config, const std::vector<Output>& outputs) {
  const fs::path dir(ctx.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& o : outputs) {
    Json manifest;
    manifest["command"] = command;
    manifest["version"] = LTFB_GIT_VERSION;
    manifest["config"] = config;
    manifest["output"] = o.stem + ".csv";
    write_atomically(dir / (o.stem + ".csv"), o.csv);
    write_atomically(dir / (o.stem + ".json"), manifest.dump(2) + "\n");
    *ctx.out << (dir / (o.stem + ".csv")).string() << "\n";
  }
}

// --- option groups -------------------------------------------------------

struct RsdOptions {
  int k = 100;
  double c = 0.1;
  double delta = 1.0;

  void add(CLI::App* app) {
    app->add_option("--k", k, "Number of input symbols")->capture_default_str();
    app->add_option("--c", c, "Robust Soliton constant c")->capture_default_str();
    app->add_option("--delta", delta, "Robust Soliton failure bound delta")->capture_default_str();
  }
  RsdParams params() const {
    RsdParams p{k, c, delta};
    p.validate();
    return p;
  }
  void record(Json& j) const {
    j["k"] = k;
    j["c"] = c;
    j["delta"] = delta;
  }
};

struct LayerOptions {
  double alpha = 0.5;
  double beta = 9.0;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "Base-layer fraction of the block")->capture_default_str();
    app->add_option("--beta", beta, "Base-layer selection weight relative to refinement")->capture_default_str();
  }
  void record(Json& j) const {
    j["alpha"] = alpha;
    j["beta"] = beta;
  }
};

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

// --- analyze -------------------------------------------------------------

void add_analyze(CLI::App& root, Context& ctx, std::function<void()>& action) {
  auto* analyze = root.add_subcommand("analyze", "Closed-form degree-distribution analysis");
  analyze->require_subcommand(1);

  {
    auto* cmd = analyze->add_subcommand("reduced", "P(reduced degree 0) against the number of decoded symbols");
    auto rsd = std::make_shared<RsdOptions>();
    rsd->add(cmd);
    cmd->callback([&, rsd] {
      action = [&, rsd] {
        const auto dist = robust_soliton(rsd->params());
        Csv csv({"decoded", "undecoded", "p_reduced_degree_0", "p_reduced_degree_1"});
        for (int decoded = 0; decoded <= rsd->k; ++decoded) {
          const auto r = reduced_degree_dist(dist, rsd->k - decoded);
          csv.row({double(decoded), double(rsd->k - decoded), r[0], r[1]});
        }
        Json cfg;
        rsd->record(cfg);
        emit(ctx, "analyze reduced", cfg, {{"reduced", csv.text()}});
      };
    });
  }

  {
    auto* cmd = analyze->add_subcommand("reduced-acked", "P(reduced degree 0) against the number of acknowledged symbols");
    auto rsd = std::make_shared<RsdOptions>();
    auto undecoded = std::make_shared<int>(10);
    rsd->add(cmd);
    cmd->add_option("--undecoded,--L", *undecoded, "Undecoded symbols L")->capture_default_str();
    cmd->callback([&, rsd, undecoded] {
      action = [&, rsd, undecoded] {
        const auto dist = robust_soliton(rsd->params());
        const int L = *undecoded;
        if (L < 0 || L > rsd->k) throw UsageError("--undecoded must lie in [0, k]");
        Csv csv({"acked", "p_reduced_degree_0"});
        for (int m = 0; m <= rsd->k - L; ++m) csv.row({double(m), redundancy_prob_acked(dist, L, m)});
        Json cfg;
        rsd->record(cfg);
        cfg["undecoded"] = L;
        emit(ctx, "analyze reduced-acked", cfg, {{"reduced_acked", csv.text()}});
      };
    });
  }

  {
    auto* cmd = analyze->add_subcommand("adaptive", "Adaptive encoder distribution over L undecoded symbols");
    auto rsd = std::make_shared<RsdOptions>();
    auto undecoded = std::make_shared<int>(50);
    rsd->add(cmd);
    cmd->add_option("--undecoded,--L", *undecoded, "Undecoded symbols L")->capture_default_str();
    cmd->callback([&, rsd, undecoded] {
      action = [&, rsd, undecoded] {
        const auto dist = robust_soliton(rsd->params());
        if (*undecoded < 1 || *undecoded > rsd->k) throw UsageError("--undecoded must lie in [1, k]");
        const auto a = adaptive_degree_dist(dist, *undecoded);
        Csv csv({"degree", "probability"});
        for (int d = 1; d <= a.k; ++d) csv.row({double(d), a[d]});
        Json cfg;
        rsd->record(cfg);
        cfg["undecoded"] = *undecoded;
        emit(ctx, "analyze adaptive", cfg, {{"adaptive", csv.text()}});
      };
    });
  }

  {
    auto* cmd = analyze->add_subcommand("two-layer", "P(reduced degree (0,0)) over the undecoded (base, refinement) grid");
    auto rsd = std::make_shared<RsdOptions>();
    auto layers = std::make_shared<LayerOptions>();
    rsd->add(cmd);
    layers->add(cmd);
    cmd->callback([&, rsd, layers] {
      action = [&, rsd, layers] {
        const auto dist = robust_soliton(rsd->params());
        const auto cfg_layers = LayerConfig::two_layer(rsd->k, layers->alpha, layers->beta);
        const TwoLayerAnalyzer analyzer(dist, cfg_layers);
        Csv csv({"base_undecoded", "refinement_undecoded", "p_reduced_degree_0_0"});
        for (int b = 0; b <= cfg_layers.layer_sizes[0]; ++b) {
          for (int r = 0; r <= cfg_layers.layer_sizes[1]; ++r) csv.row({double(b), double(r), analyzer.redundancy(b, r)});
        }
        Json cfg;
        rsd->record(cfg);
        layers->record(cfg);
        emit(ctx, "analyze two-layer", cfg, {{"two_layer", csv.text()}});
      };
    });
  }

  {
    auto* cmd = analyze->add_subcommand("n-layer", "Joint reduced-degree pmf of an N-layer code");
    auto rsd = std::make_shared<RsdOptions>();
    auto sizes = std::make_shared<std::string>("30,30,40");
    auto weights = std::make_shared<std::string>("9,3,1");
    auto undecoded = std::make_shared<std::string>("10,20,30");
    rsd->add(cmd);
    cmd->add_option("--sizes", *sizes, "Comma-separated layer sizes (sum to k)")->capture_default_str();
    cmd->add_option("--weights", *weights, "Comma-separated selection weights")->capture_default_str();
    cmd->add_option("--undecoded", *undecoded, "Comma-separated undecoded counts per layer")->capture_default_str();
    cmd->callback([&, rsd, sizes, weights, undecoded] {
      action = [&, rsd, sizes, weights, undecoded] {
        const auto dist = robust_soliton(rsd->params());
        LayerConfig layers{parse_int_list(*sizes, "--sizes"), parse_double_list(*weights, "--weights")};
        layers.validate();
        if (layers.total() != rsd->k) throw UsageError("--sizes must sum to k");
        const auto u = parse_int_list(*undecoded, "--undecoded");
        const auto joint = n_layer_reduced_dist(dist, layers, u);
        std::vector<std::string> header;
        for (int g = 0; g < layers.count(); ++g) header.push_back("layer" + std::to_string(g) + "_degree");
        header.push_back("probability");
        Csv csv(header);
        for (std::size_t f = 0; f < joint.pmf.size(); ++f) {
          std::vector<double> row;
          for (int v : joint.unflatten(f)) row.push_back(v);
          row.push_back(joint.pmf[f]);
          csv.row_values(row);
        }
        Json cfg;
        rsd->record(cfg);
        cfg["sizes"] = layers.layer_sizes;
        cfg["weights"] = layers.weights;
        cfg["undecoded"] = u;
        emit(ctx, "analyze n-layer", cfg, {{"n_layer", csv.text()}});
      };
    });
  }
}

// --- simulate ------------------------------------------------------------

struct SimOptions {
  std::size_t width = 8;
  int runs = 1000;
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_runs) {
    app->add_option("--width", width, "Symbol width in bytes")->capture_default_str();
    if (with_runs) app->add_option("--runs", runs, "Independent transmissions per scheme")->capture_default_str();
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
  }
  void record(Json& j, bool with_runs) const {
    j["width"] = width;
    if (with_runs) j["runs"] = runs;
    j["seed"] = seed;
  }
};

std::string summary_csv(const std::vector<SchemeSummary>& schemes, int runs) {
  Csv csv({"scheme", "runs", "completed", "mean_overhead", "overhead_stddev", "base_first_fraction",
           "mean_layer_acks", "redundant_fraction", "payload_mismatches"});
  for (const auto& s : schemes) {
    const double redundant = s.receptions ? double(s.redundant_receptions) / double(s.receptions) : 0.0;
    csv.row({s.name, double(runs), double(s.overheads.size()), s.mean_overhead, s.overhead_stddev,
             s.base_first_fraction, s.mean_layer_acks, redundant, double(s.payload_mismatches)});
  }
  return csv.text();
}

void check_mismatches(std::int64_t mismatches) {
  if (mismatches != 0) {
    throw std::runtime_error("decoder produced " + std::to_string(mismatches) + " payloads differing from the source");
  }
}

void add_simulate(CLI::App& root, Context& ctx, std::function<void()>& action) {
  auto* simulate = root.add_subcommand("simulate", "Monte-Carlo transmission experiments");
  simulate->require_subcommand(1);

  {
    auto* cmd = simulate->add_subcommand("single", "Single-layer code: no feedback vs per-symbol ACK");
    auto rsd = std::make_shared<RsdOptions>();
    auto sim = std::make_shared<SimOptions>();
    rsd->k = 1000;
    rsd->add(cmd);
    sim->add(cmd, true);
    cmd->callback([&, rsd, sim] {
      action = [&, rsd, sim] {
        rsd->params();
        if (sim->runs < 1) throw UsageError("--runs must be positive");
        SingleLayerExperiment e{rsd->k, rsd->c, rsd->delta, sim->width, sim->runs, sim->seed, ctx.threads};
        const auto schemes = experiment_single_layer(e);
        Csv csv({"scheme", "received", "mean_undecoded_fraction"});
        for (const auto& s : schemes) {
          for (std::size_t x = 0; x < s.curves[0].size(); ++x) csv.row({s.name, double(x), s.curves[0][x]});
          check_mismatches(s.payload_mismatches);
        }
        Json cfg;
        rsd->record(cfg);
        sim->record(cfg, true);
        emit(ctx, "simulate single", cfg, {{"single", csv.text()}, {"single_summary", summary_csv(schemes, sim->runs)}});
      };
    });
  }

  {
    auto* cmd = simulate->add_subcommand("two-layer", "Two-layer code with and without a layer ACK");
    auto rsd = std::make_shared<RsdOptions>();
    auto layers = std::make_shared<LayerOptions>();
    auto sim = std::make_shared<SimOptions>();
    auto ack = std::make_shared<std::string>("both");
    auto baseline = std::make_shared<bool>(true);
    auto reparam = std::make_shared<bool>(true);
    rsd->k = 1000;
    rsd->add(cmd);
    layers->add(cmd);
    sim->add(cmd, true);
    cmd->add_option("--ack", *ack, "Layer ACK schemes to run: layer, none or both")
        ->check(CLI::IsMember({"layer", "none", "both"}))
        ->capture_default_str();
    cmd->add_option("--baseline", *baseline, "Also run the single-layer baseline")->capture_default_str();
    cmd->add_option("--reparameterize", *reparam, "Switch to the RSD over the remaining symbols after a layer ACK")
        ->capture_default_str();
    cmd->callback([&, rsd, layers, sim, ack, baseline, reparam] {
      action = [&, rsd, layers, sim, ack, baseline, reparam] {
        rsd->params();
        LayerConfig::two_layer(rsd->k, layers->alpha, layers->beta);
        if (sim->runs < 1) throw UsageError("--runs must be positive");
        TwoLayerExperiment e;
        e.k = rsd->k;
        e.c = rsd->c;
        e.delta = rsd->delta;
        e.alpha = layers->alpha;
        e.beta = layers->beta;
        e.width = sim->width;
        e.runs = sim->runs;
        e.seed = sim->seed;
        e.threads = ctx.threads;
        e.with_layer_ack = *ack != "none";
        e.without_ack = *ack != "layer";
        e.single_layer_baseline = *baseline;
        e.reparameterize_after_layer_ack = *reparam;
        const auto schemes = experiment_two_layer(e);
        Csv csv({"scheme", "layer", "received", "mean_undecoded_fraction"});
        for (const auto& s : schemes) {
          for (std::size_t g = 0; g < s.curves.size(); ++g) {
            for (std::size_t x = 0; x < s.curves[g].size(); ++x) csv.row({s.name, double(g), double(x), s.curves[g][x]});
          }
          check_mismatches(s.payload_mismatches);
        }
        Json cfg;
        rsd->record(cfg);
        layers->record(cfg);
        sim->record(cfg, true);
        cfg["ack"] = *ack;
        cfg["baseline"] = *baseline;
        cfg["reparameterize"] = *reparam;
        emit(ctx, "simulate two-layer", cfg,
             {{"two_layer", csv.text()}, {"two_layer_summary", summary_csv(schemes, sim->runs)}});
      };
    });
  }

  {
    auto* cmd = simulate->add_subcommand("distortion", "Mean distortion against SER under a 2k-symbol deadline");
    auto rsd = std::make_shared<RsdOptions>();
    auto layers = std::make_shared<LayerOptions>();
    auto sim = std::make_shared<SimOptions>();
    auto ser = std::make_shared<std::string>("0:0.05:1");
    auto seconds = std::make_shared<int>(100);
    auto basis = std::make_shared<std::string>("sent");
    auto reparam = std::make_shared<bool>(true);
    auto model = std::make_shared<RateDistortionModel>();
    rsd->add(cmd);
    layers->add(cmd);
    sim->add(cmd, false);
    cmd->add_option("--ser", *ser, "SER grid as start:step:stop or a comma-separated list")->capture_default_str();
    cmd->add_option("--seconds", *seconds, "Trials (one second of video each) per SER")->capture_default_str();
    cmd->add_option("--deadline-basis", *basis, "Count the 2k deadline in sent or received symbols")
        ->check(CLI::IsMember({"sent", "received"}))
        ->capture_default_str();
    cmd->add_option("--reparameterize", *reparam, "Switch to the RSD over the remaining symbols after a layer ACK")
        ->capture_default_str();
    cmd->add_option("--bitrate", model->bitrate, "Source bitrate in bit/s")->capture_default_str();
    cmd->add_option("--frame-width", model->width, "Frame width in samples")->capture_default_str();
    cmd->add_option("--frame-height", model->height, "Frame height in samples")->capture_default_str();
    cmd->add_option("--fps", model->fps, "Frames per second")->capture_default_str();
    cmd->callback([&, rsd, layers, sim, ser, seconds, basis, reparam, model] {
      action = [&, rsd, layers, sim, ser, seconds, basis, reparam, model] {
        rsd->params();
        LayerConfig::two_layer(rsd->k, layers->alpha, layers->beta);
        model->validate();
        if (*seconds < 1) throw UsageError("--seconds must be positive");
        DistortionExperiment e;
        e.k = rsd->k;
        e.c = rsd->c;
        e.delta = rsd->delta;
        e.alpha = layers->alpha;
        e.beta = layers->beta;
        e.width = sim->width;
        e.ser_grid = parse_grid(*ser);
        e.seconds = *seconds;
        e.seed = sim->seed;
        e.threads = ctx.threads;
        e.deadline_basis = *basis == "sent" ? DeadlineBasis::sent : DeadlineBasis::received;
        e.reparameterize_after_layer_ack = *reparam;
        e.model = *model;
        const auto result = experiment_distortion(e);
        check_mismatches(result.payload_mismatches);
        std::vector<std::string> header{"ser"};
        for (const auto& s : result.schemes) header.push_back(s);
        for (const auto& s : result.schemes) header.push_back(s + "_stderr");
        Csv csv(header);
        for (const auto& p : result.points) {
          std::vector<double> row{p.ser};
          row.insert(row.end(), p.mean.begin(), p.mean.end());
          row.insert(row.end(), p.standard_error.begin(), p.standard_error.end());
          csv.row_values(row);
        }
        Json cfg;
        rsd->record(cfg);
        layers->record(cfg);
        sim->record(cfg, false);
        cfg["ser"] = e.ser_grid;
        cfg["seconds"] = *seconds;
        cfg["deadline_symbols"] = 2 * rsd->k;
        cfg["deadline_basis"] = *basis;
        cfg["reparameterize"] = *reparam;
        cfg["bitrate"] = model->bitrate;
        cfg["frame_width"] = model->width;
        cfg["frame_height"] = model->height;
        cfg["fps"] = model->fps;
        emit(ctx, "simulate distortion", cfg, {{"distortion", csv.text()}});
      };
    });
  }
}

std::string json_scalar(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ',';
      out += json_scalar(item, key);
    }
    return out;
  }
  throw UsageError("config key '" + key + "' must hold a scalar or a flat list");
}

/// Expands `--config file.json` into flags placed after the command line ones;
/// keys already given as flags are skipped so that flags win.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;
  std::ifstream f(*path);
  if (!f) throw UsageError("cannot read config file " + *path);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw UsageError("config file " + *path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a flat JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : rest) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    rest.push_back(flag);
    rest.push_back(json_scalar(value, key));
  }
  return rest;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_double_list(text, "--ser");
  const auto parts = [&] {
    std::vector<std::string> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(item);
    return p;
  }();
  if (parts.size() != 3) throw UsageError("--ser range must look like start:step:stop");
  const auto v = parse_double_list(parts[0] + "," + parts[1] + "," + parts[2], "--ser");
  const double start = v[0], step = v[1], stop = v[2];
  if (!(step > 0.0)) throw UsageError("--ser step must be positive");
  if (stop < start) throw UsageError("--ser stop lies below start");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> grid;
  for (long i = 0; i <= n; ++i) {
    // Round to suppress accumulated binary noise (0.15000000000000002 etc.).
    grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return grid;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LT codes with acknowledgement feedback: analysis and simulation", "ltfb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LTFB_GIT_VERSION));

  const char* env_dir = std::getenv("LTFB_OUTPUT_DIR");
  Context ctx;
  ctx.output_dir = env_dir && *env_dir ? env_dir : ".";
  ctx.threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  ctx.out = &out;
  std::string config_placeholder;
  app.add_option("-o,--output-dir", ctx.output_dir, "Directory for CSV and manifest files (env LTFB_OUTPUT_DIR)")
      ->capture_default_str();
  app.add_option("--threads", ctx.threads, "Worker threads for simulations")->capture_default_str();
  app.add_option("--config", config_placeholder, "Flat JSON file of option values; flags override it");

  std::function<void()> action;
  add_analyze(app, ctx, action);
  add_simulate(app, ctx, action);

  try {
    auto args = apply_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    out << msg.str();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    err << msg.str();
    return exit_invalid_arguments;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_arguments;
  }
  if (ctx.threads < 1) {
    err << "error: --threads must be positive\n";
    return exit_invalid_arguments;
  }

  try {
    if (action) action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_arguments;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_arguments;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_arguments;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_runtime_failure;
  }
  return exit_ok;
}

}  // namespace ltfb::cli
