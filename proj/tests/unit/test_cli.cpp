// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hefl/ckks/params.hpp"
#include "hefl/ckks/serialize.hpp"
#include "hefl/cli/cli.hpp"
#include "hefl/fl/experiment.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = hefl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("hefl_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const auto p = dir / "config.in.json";
  std::ofstream(p) << body;
  return p;
}

const char* kSmall =
    R"({"profile":"desk","ckks_profile":"test-small","encryption_ratio":[0,0.5],"rounds":2,)"
    R"("train_size":90,"test_size":30})";

}  // namespace

TEST_CASE("help output matches golden files") {
  const fs::path golden = HEFL_GOLDEN_DIR;
  for (const std::string sub : {"", "keygen", "train", "attack", "report", "bench"}) {
    CAPTURE(sub);
    std::vector<std::string> args;
    if (!sub.empty()) args.push_back(sub);
    args.push_back("--help");
    const auto r = invoke(args);
    CHECK(r.code == 0);
    CHECK(r.out == slurp(golden / ((sub.empty() ? "hefl" : sub) + "_help.txt")));
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"train", "--bogus"}).code == 2);
  CHECK(invoke({"train", "--out", "x"}).code == 2);  // --config missing
  CHECK(invoke({"bench", "--sizes", ""}).code == 2);
  CHECK(invoke({"bench", "--sizes", "12,abc"}).code == 2);
  CHECK(invoke({"report"}).code == 2);
}

TEST_CASE("error categories map to exit codes") {
  const auto dir = scratch("codes");
  CHECK(invoke({"train", "--config", (dir / "missing.json").string(), "--out", dir.string()}).code == 6);
  const auto bad = write_config(dir, R"({"profile":"desk","learning_rate":0.1})");
  const auto r = invoke({"train", "--config", bad.string(), "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("learning_rate") != std::string::npos);
  const auto good = write_config(dir, kSmall);
  CHECK(invoke({"train", "--config", good.string(), "--out", dir.string(), "--set", "clients=0"}).code == 3);
  CHECK(invoke({"report", (dir / "nothing-here").string()}).code == 6);
}

TEST_CASE("keygen writes keys whose header encodes the ring dimension") {
  const auto dir = scratch("keygen");
  for (const auto& [profile, log_n] : {std::pair{"paper-128", 13u}, std::pair{"test-small", 10u}}) {
    CAPTURE(profile);
    const auto a = dir / (std::string(profile) + "_a");
    const auto b = dir / (std::string(profile) + "_b");
    const auto r = invoke({"keygen", "--ckks-profile", profile, "--seed", "9", "--out", a.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("fingerprint") != std::string::npos);
    REQUIRE(invoke({"keygen", "--ckks-profile", profile, "--seed", "9", "--out", b.string()}).code == 0);
    for (const char* f : {"public.key", "secret.key"}) {
      const auto bytes = hefl::ckks::read_file(a / f);
      CHECK(hefl::ckks::fingerprint_log_ring_dim(hefl::ckks::read_header(bytes).fingerprint) == log_n);
      CHECK(bytes == hefl::ckks::read_file(b / f));
    }
  }
  CHECK(invoke({"keygen", "--ckks-profile", "tiny"}).code != 0);
}

TEST_CASE("bench emits one row per operation") {
  const auto r = invoke({"bench", "--ckks-profile", "paper-128", "--sizes", "4096", "--reps", "3"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "size,operation,median_ms,reps");
  const char* ops[] = {"encode", "encrypt", "add", "mul-rescale", "decrypt"};
  for (int i = 0; i < 5; ++i) CHECK(rows[i + 1].rfind(std::string("4096,") + ops[i] + ",", 0) == 0);

  // Sizes past one ciphertext are split into chunks.
  const auto rows2 = hefl::cli::bench("test-small", std::vector<std::size_t>{1500}, 1, 1);
  CHECK(rows2.size() == 5);
}

TEST_CASE("train writes records and report is deterministic") {
  const auto dir = scratch("train");
  const auto cfg = write_config(dir, kSmall);
  const auto run = dir / "run";
  const auto r = invoke({"train", "--config", cfg.string(), "--out", run.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(run / "records_r0.00.jsonl"));
  CHECK(fs::exists(run / "records_r0.50.jsonl"));
  CHECK(fs::exists(run / "checkpoint_r0.50.ckpt"));
  CHECK(hefl::fl::read_records(run / "records_r0.50.jsonl").size() == 2);

  REQUIRE(invoke({"report", run.string(), "--out", (dir / "rep1").string()}).code == 0);
  REQUIRE(invoke({"report", run.string(), "--out", (dir / "rep2").string()}).code == 0);
  const auto radar = slurp(dir / "rep1" / "radar.csv");
  CHECK(radar == slurp(dir / "rep2" / "radar.csv"));
  CHECK(slurp(dir / "rep1" / "summary.json") == slurp(dir / "rep2" / "summary.json"));
  CHECK(std::count(radar.begin(), radar.end(), '\n') == 3);

  // Flags override config values; --resume continues from the checkpoint.
  const auto r2 = invoke({"train", "--config", cfg.string(), "--out", run.string(), "--encryption-ratio", "0.5",
                        "--set", "rounds=3", "--resume"});
  REQUIRE(r2.code == 0);
  CHECK(hefl::fl::read_records(run / "records_r0.50.jsonl").size() == 3);
}

TEST_CASE("attack on a captured update") {
  const auto dir = scratch("attack");
  const auto cfg = write_config(dir, R"({"profile":"desk","ckks_profile":"test-small","encryption_ratio":0,)"
                                     R"("rounds":1,"train_size":30,"test_size":10,"batch_size":1,)"
                                     R"("capture_round":1,"attack":{"iterations":400,"restarts":2}})");
  REQUIRE(invoke({"train", "--config", cfg.string(), "--out", dir.string(), "--single-step"}).code == 0);
  const auto update = dir / "update_r0.00_t1_c0.json";
  REQUIRE(fs::exists(update));
  const auto r = invoke({"attack", "--config", cfg.string(), "--update", update.string(), "--out", (dir / "a").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "a" / "report.json"));
  CHECK(fs::exists(dir / "a" / "reconstruction.pgm"));
  CHECK(fs::exists(dir / "a" / "target.pgm"));
  const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["report"]["success"] == true);
  CHECK(invoke({"attack", "--update", (dir / "none.json").string()}).code == 6);
  CHECK(invoke({"attack"}).code == 2);
}

TEST_CASE("attack sweep from a config") {
  const auto dir = scratch("sweep");
  const auto cfg = write_config(dir, R"({"profile":"desk","ckks_profile":"test-small","train_size":30,)"
                                     R"("test_size":10,"attack":{"iterations":50,"restarts":1}})");
  const auto r = invoke({"attack", "--config", cfg.string(), "--out", dir.string(), "--encryption-ratio", "0,1",
                       "--seeds", "2"});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  REQUIRE(report["rows"].size() == 2);
  CHECK(report["rows"][1]["success_rate"] == 0.0);
  CHECK(report["rows"][1]["mean_visible"] == 0.0);
}
