#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "widthlab/tools/commands.hpp"
#include "widthlab/tools/config.hpp"
#include "widthlab/tools/io.hpp"

using namespace widthlab;
using namespace widthlab::tools;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string validation_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<accepted>";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("widthlab_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(Config, MissingSeedNamesTheField) {
  EXPECT_EQ(validation_path(json::parse(R"({"manifold": {"kind": "circle"}})")), "seed");
  EXPECT_EQ(parse_config(json::parse(R"({})"), 5).seed, 5u);
}

TEST(Config, ErrorsCarryFieldPaths) {
  EXPECT_EQ(validation_path(json::parse(R"({"seed": 1, "bogus": 2})")), "bogus");
  EXPECT_EQ(validation_path(json::parse(R"({"seed": 1, "manifold": {"kind": "klein"}})")), "manifold.kind");
  EXPECT_EQ(validation_path(json::parse(R"({"seed": 1, "rates": {"specs": [{"p": "2", "q": "2", "r": "1"},
                                                                    {"p": "1", "q": "inf", "r": "1"}]}})")),
            "rates.specs[1]");
  EXPECT_EQ(validation_path(json::parse(R"({"seed": -3})")), "seed");
}

TEST(Config, GridsAcceptListsAndGeometricRanges) {
  const ExperimentConfig c =
      parse_config(json::parse(R"({"seed": 1, "kernel_scan": {"t_grid": {"lo": 0.125, "hi": 1, "ratio": 2}},
                                    "packing": {"N_grid": [4, 8]}})"));
  EXPECT_EQ(c.t_grid, (std::vector<double>{0.125, 0.25, 0.5, 1.0}));
  EXPECT_EQ(c.N_grid, (std::vector<int>{4, 8}));
}

TEST(Config, HashIsCanonical) {
  const ExperimentConfig a = parse_config(json::parse(R"({"seed": 3, "manifold": {"kind": "sphere"}, "filter": {"Q": 1}})"));
  const ExperimentConfig b = parse_config(json::parse(R"({"filter": {"Q": 1}, "manifold": {"kind": "sphere"}, "seed": 3})"));
  const ExperimentConfig c = parse_config(json::parse(R"({"filter": {"Q": 2}, "manifold": {"kind": "sphere"}, "seed": 3})"));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(parse_config(to_json(a))), config_hash(a));
}

TEST(Config, ShippedConfigsRoundTrip) {
  int seen = 0;
  for (const auto& e : fs::directory_iterator(fs::path(WIDTHLAB_SOURCE_DIR) / "configs")) {
    if (e.path().extension() != ".json") continue;
    const ExperimentConfig c = load_config(e.path().string());
    EXPECT_EQ(config_hash(parse_config(to_json(c))), config_hash(c)) << e.path();
    ++seen;
  }
  EXPECT_GT(seen, 5);
}

TEST(Csv, FormatsAndQuotes) {
  CsvTable t({"a", "b", "c", "d"});
  t.row().add(0.1).add(std::size_t{7}).add(true).add("x,\"y\"");
  EXPECT_EQ(t.render(), "a,b,c,d\n0.10000000000000001,7,true,\"x,\"\"y\"\"\"\n");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Io, AtomicWriteAndSidecar) {
  const fs::path dir = scratch("io");
  CsvTable t({"x"});
  t.row().add(1.5);
  const std::string path = write_table(dir.string(), "tab", t, {"unit", "abc", 9});
  EXPECT_EQ(slurp(path), "x\n1.5\n");
  const json meta = json::parse(slurp(dir / "tab.meta.json"));
  EXPECT_EQ(meta["seed"], 9);
  EXPECT_EQ(meta["config_hash"], "abc");
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
  fs::remove_all(dir);
}

TEST(Parallel, CoversEveryIndexAndRethrowsFirstError) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 4) throw std::runtime_error("task " + std::to_string(i));
    });
    FAIL() << "no exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "task 4");
  }
}

TEST(Commands, PackingWritesInvariantTables) {
  const fs::path dir = scratch("packing");
  const ExperimentConfig c = parse_config(json::parse(R"({"seed": 1, "manifold": {"kind": "torus"},
                                                          "packing": {"N_grid": [8, 16]}})"));
  const CommandResult r = cmd_packing(c, {dir.string(), 1, ""});
  EXPECT_TRUE(r.falsified.empty());
  const std::string csv = slurp(dir / "packing.csv");
  EXPECT_NE(csv.find(",true,true"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const fs::path cfg = dir / "c.json";
  std::ofstream(cfg) << R"({"manifold": {"kind": "circle"}, "spectra": {"t_grid": [400, 800, 1600, 3200]}})";
  auto run = [&](std::vector<std::string> args) {
    std::vector<char*> argv;
    std::string prog = "widthlab";
    argv.push_back(prog.data());
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };
  EXPECT_EQ(run({"spectra", "--config", cfg.string(), "--out", (dir / "o").string()}), 2); // no seed
  EXPECT_EQ(run({"spectra", "--config", cfg.string(), "--out", (dir / "o").string(), "--seed", "4"}), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "weyl.csv"));
  EXPECT_EQ(run({"spectra", "--config", (dir / "missing.json").string()}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  fs::remove_all(dir);
}
