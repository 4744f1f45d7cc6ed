#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"

namespace fs = std::filesystem;
using ltfb::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("ltfb_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int call(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run(args, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("grid parsing and number formatting") {
    const auto g = ltfb::cli::parse_grid("0:0.05:1");
    REQUIRE(g.size() == 21);
    CHECK(g[3] == 0.15);
    CHECK(g.back() == 1.0);
    CHECK(ltfb::cli::parse_grid("0.1,0.3") == std::vector<double>{0.1, 0.3});
    CHECK(ltfb::cli::format_number(0.1) == "0.1");
    CHECK(ltfb::cli::format_number(1.0 / 3.0) == "0.333333333");
    CHECK(ltfb::cli::format_number(-0.0) == "0");
  }

  TEST_CASE("analyze reduced writes one row per decoded count") {
    TempDir dir;
    REQUIRE(call({"-o", dir.path.string(), "analyze", "reduced", "--k", "100", "--c", "0.1", "--delta", "1.0"}) == 0);
    const auto rows = read_csv(dir.path / "reduced.csv");
    REQUIRE(rows.size() == 102);
    CHECK(rows[0][2] == "p_reduced_degree_0");
    CHECK(rows[1][0] == "0");
    CHECK(rows[1][2] == "0");
    CHECK(rows.back()[2] == "1");
    const auto manifest = nlohmann::json::parse(slurp(dir.path / "reduced.json"));
    CHECK(manifest["config"]["k"] == 100);
    CHECK(manifest.contains("version"));
  }

  TEST_CASE("analyze two-layer grid") {
    TempDir dir;
    REQUIRE(call({"-o", dir.path.string(), "analyze", "two-layer", "--k", "100", "--alpha", "0.5", "--beta", "9"}) == 0);
    const auto rows = read_csv(dir.path / "two_layer.csv");
    CHECK(rows.size() == 1 + 51 * 51);
    bool found = false;
    for (const auto& r : rows) {
      if (r[0] == "50" && r[1] == "50") {
        CHECK(r[2] == "0");
        found = true;
      }
    }
    CHECK(found);
  }

  TEST_CASE("other analyses run") {
    TempDir dir;
    CHECK(call({"-o", dir.path.string(), "analyze", "reduced-acked", "--k", "100", "--undecoded", "10"}) == 0);
    CHECK(read_csv(dir.path / "reduced_acked.csv").size() == 92);
    CHECK(call({"-o", dir.path.string(), "analyze", "adaptive", "--k", "100", "--undecoded", "30"}) == 0);
    CHECK(read_csv(dir.path / "adaptive.csv").size() == 31);
    CHECK(call({"-o", dir.path.string(), "analyze", "n-layer", "--k", "30", "--sizes", "10,20", "--weights", "3,1",
                "--undecoded", "2,3"}) == 0);
    CHECK(read_csv(dir.path / "n_layer.csv").size() == 1 + 3 * 4);
  }

  TEST_CASE("invalid input exits with 2 and writes nothing") {
    TempDir dir;
    std::string err;
    CHECK(call({"-o", dir.path.string(), "analyze", "reduced", "--k", "0"}, &err) == 2);
    CHECK(err.find("k must be positive") != std::string::npos);
    CHECK(call({"-o", dir.path.string(), "analyze", "two-layer", "--alpha", "1.5"}, &err) == 2);
    CHECK(err.find("alpha") != std::string::npos);
    CHECK(call({"-o", dir.path.string(), "simulate", "single", "--runs", "0"}) == 2);
    CHECK(call({"-o", dir.path.string(), "simulate", "distortion", "--ser", "0:0:1"}) == 2);
    CHECK(call({"-o", dir.path.string(), "simulate", "distortion", "--ser", "0,2"}) == 2);
    CHECK(call({"-o", dir.path.string(), "simulate", "two-layer", "--ack", "maybe"}) == 2);
    CHECK(call({"-o", dir.path.string(), "analyze"}) == 2);
    CHECK(call({"-o", dir.path.string(), "frobnicate"}) == 2);
    CHECK(call({"-o", dir.path.string(), "analyze", "reduced", "--config", (dir.path / "missing.json").string()}) == 2);
    CHECK(fs::is_empty(dir.path));
  }

  TEST_CASE("unwritable output is a runtime failure") {
    TempDir dir;
    const auto blocker = dir.path / "file";
    std::ofstream(blocker) << "x";
    CHECK(call({"-o", (blocker / "sub").string(), "analyze", "adaptive", "--k", "20", "--undecoded", "5"}) == 3);
  }

  TEST_CASE("simulations are reproducible byte for byte") {
    TempDir a, b;
    const std::vector<std::string> tail{"simulate", "single", "--k", "100", "--runs", "10", "--seed", "7"};
    auto args_a = tail, args_b = tail;
    args_a.insert(args_a.begin(), {"-o", a.path.string(), "--threads", "1"});
    args_b.insert(args_b.begin(), {"-o", b.path.string(), "--threads", "3"});
    REQUIRE(call(args_a) == 0);
    REQUIRE(call(args_b) == 0);
    CHECK(slurp(a.path / "single.csv") == slurp(b.path / "single.csv"));
    CHECK(slurp(a.path / "single_summary.csv") == slurp(b.path / "single_summary.csv"));
    CHECK(slurp(a.path / "single.json") == slurp(b.path / "single.json"));
    const auto rows = read_csv(a.path / "single.csv");
    CHECK(rows[0] == std::vector<std::string>{"scheme", "received", "mean_undecoded_fraction"});
  }

  TEST_CASE("two-layer manifest records every parameter") {
    TempDir dir;
    REQUIRE(call({"-o", dir.path.string(), "simulate", "two-layer", "--k", "200", "--alpha", "0.5", "--beta", "9",
                  "--runs", "5", "--ack", "layer"}) == 0);
    const auto m = nlohmann::json::parse(slurp(dir.path / "two_layer.json"));
    for (const char* key : {"k", "c", "delta", "alpha", "beta", "width", "runs", "seed", "ack", "baseline", "reparameterize"}) {
      CHECK_MESSAGE(m["config"].contains(key), key);
    }
    CHECK(m["config"]["ack"] == "layer");
    const auto summary = read_csv(dir.path / "two_layer_summary.csv");
    REQUIRE(summary.size() == 3);  // header, two_layer_ack, single_layer
    CHECK(summary[1][0] == "two_layer_ack");
  }

  TEST_CASE("distortion table has one column per scheme") {
    TempDir dir;
    REQUIRE(call({"-o", dir.path.string(), "simulate", "distortion", "--k", "100", "--ser", "0:0.25:1", "--seconds", "20"}) == 0);
    const auto rows = read_csv(dir.path / "distortion.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][1] == "single_layer");
    CHECK(rows[0][2] == "two_layer");
    CHECK(rows[0][3] == "two_layer_ack");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      for (std::size_t c = 1; c <= 3; ++c) {
        const double v = std::stod(rows[r][c]);
        CHECK(v >= 0.740192397 - 1e-9);
        CHECK(v <= 1.0);
      }
    }
    CHECK(rows.back()[1] == "1");
  }

  TEST_CASE("config file supplies defaults and flags win") {
    TempDir dir;
    const auto cfg = dir.path / "cfg.json";
    std::ofstream(cfg) << R"({"k": 60, "undecoded": 20, "c": 0.2})";
    const auto out = dir.path / "out";
    REQUIRE(call({"-o", out.string(), "analyze", "adaptive", "--config", cfg.string(), "--undecoded", "10"}) == 0);
    const auto m = nlohmann::json::parse(slurp(out / "adaptive.json"));
    CHECK(m["config"]["k"] == 60);
    CHECK(m["config"]["c"] == 0.2);
    CHECK(m["config"]["undecoded"] == 10);
    std::ofstream(cfg) << R"({"unknown_key": 1})";
    CHECK(call({"-o", out.string(), "analyze", "adaptive", "--config", cfg.string()}) == 2);
  }

  TEST_CASE("environment sets the default output directory") {
    TempDir dir;
    ::setenv("LTFB_OUTPUT_DIR", dir.path.string().c_str(), 1);
    const int rc = call({"analyze", "adaptive", "--k", "20", "--undecoded", "5"});
    ::unsetenv("LTFB_OUTPUT_DIR");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "adaptive.csv"));
  }
}
