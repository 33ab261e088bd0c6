// Copyright 2026 The crymodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "crymodal/config.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/pipeline.hpp"
#include "crymodal/synth.hpp"
#include "test_support.hpp"

using namespace crymodal;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CorpusOptions small_corpus(std::size_t subjects) {
  CorpusOptions o;
  o.subjects = subjects;
  o.duration_s = 3.0;
  o.seed = 5;
  return o;
}

}  // namespace

TEST_CASE("config text parsing", "[config]") {
  RunConfig cfg;
  apply_config_text(cfg, "# comment\nseed = 42\n\n  rms_gate=0.02  # trailing\npitch.floor_hz = 250\ntier = cry\n");
  CHECK(cfg.seed == 42);
  CHECK(cfg.rms_gate == 0.02);
  CHECK(cfg.pitch.floor_hz == 250.0);
  CHECK(cfg.tier == "cry");

  auto line_of = [](std::string_view text) -> std::size_t {
    RunConfig c;
    try {
      apply_config_text(c, text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("seed = 1\nbogus = 3\n") == 2);
  CHECK(line_of("seed = 1\n\nseed = 2\n") == 3);
  CHECK(line_of("seed 1\n") == 1);
  CHECK(line_of("rms_gate = loud\n") == 1);
  CHECK(line_of("jitter.smoothing = maybe\n") == 1);
  CHECK(line_of("sampling.unit = bouts\n") == 1);
}

TEST_CASE("config entries round trip", "[config]") {
  RunConfig cfg;
  apply_config_text(cfg, "seed = 7\nwindow_s = 0.04\njitter.smoothing = false\nsampling.unit = windows\nmax_lag_s = 1.5\n");
  const auto entries = config_entries(cfg);
  RunConfig back;
  for (const auto& [k, v] : entries) apply_setting(back, k, v);
  CHECK(config_entries(back) == entries);
  CHECK(back.seed == 7);
  CHECK_FALSE(back.cycles.smooth_periods);
  CHECK(back.sampling_unit == SamplingUnit::kWindows);
  CHECK(back.sync.max_lag_s == 1.5);
}

TEST_CASE("later settings override a config file", "[config]") {
  testing::TempDir dir("cfg");
  {
    std::ofstream(dir.path() / "run.cfg") << "seed = 3\nworkers = 2\n";
  }
  RunConfig cfg;
  apply_config_file(cfg, dir.path() / "run.cfg");
  CHECK(cfg.seed == 3);
  apply_setting(cfg, "seed", "11");
  CHECK(cfg.seed == 11);
  CHECK(cfg.workers == 2);
  CHECK_THROWS_AS(apply_config_file(cfg, dir.path() / "missing.cfg"), IoError);
}

TEST_CASE("config validation", "[config]") {
  RunConfig cfg;
  cfg.corpus = "x";
  CHECK_NOTHROW(validate(cfg));
  cfg.window_s = 0.0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.segments_per_subject = 0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.pitch.floor_hz = 2000.0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
}

TEST_CASE("analyze a small corpus end to end", "[pipeline]") {
  testing::TempDir dir("analyze");
  synthesize_corpus(dir.path() / "corpus", small_corpus(4));
  RunConfig cfg;
  cfg.corpus = dir.path() / "corpus";
  cfg.out = dir.path() / "out";
  cfg.workers = 2;
  std::ostringstream log;
  REQUIRE(run_analyze(cfg, log) == 0);
  for (const char* f : {"window_measures.csv", "icc_report.csv", "bias_report.csv", "histograms_2d.csv",
                        "histograms_diff.csv", "manifest.json"})
    CHECK(std::filesystem::exists(cfg.out / f));
  const auto manifest = nlohmann::json::parse(slurp(cfg.out / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["subjects"].size() == 4);
  CHECK(manifest["config"]["seed"] == "1");
  const auto icc = slurp(cfg.out / "icc_report.csv");
  CHECK(icc.rfind("measure,", 0) == 0);
  CHECK(icc.find("f0_hz,overall") != std::string::npos);

  // Worker count does not change the bytes.
  RunConfig serial = cfg;
  serial.workers = 1;
  serial.out = dir.path() / "out_serial";
  REQUIRE(run_analyze(serial, log) == 0);
  for (const char* f : {"window_measures.csv", "icc_report.csv", "bias_report.csv"})
    CHECK(slurp(cfg.out / f) == slurp(serial.out / f));
}

TEST_CASE("a corrupt subject is skipped and recorded", "[pipeline]") {
  testing::TempDir dir("corrupt");
  synthesize_corpus(dir.path() / "corpus", small_corpus(4));
  {
    std::ofstream(dir.path() / "corpus" / "S002" / "acc.wav", std::ios::binary) << "RIFF garbage";
  }
  RunConfig cfg;
  cfg.corpus = dir.path() / "corpus";
  cfg.out = dir.path() / "out";
  std::ostringstream log;
  REQUIRE(run_analyze(cfg, log) == 0);
  const auto manifest = nlohmann::json::parse(slurp(cfg.out / "manifest.json"));
  bool seen = false;
  for (const auto& s : manifest["subjects"])
    if (s["subject_id"] == "S002") {
      seen = true;
      CHECK(s["status"] == "failed");
      CHECK_FALSE(s["error"].get<std::string>().empty());
    }
  CHECK(seen);
}

TEST_CASE("too few subjects fails the run", "[pipeline]") {
  testing::TempDir dir("two");
  synthesize_corpus(dir.path() / "corpus", small_corpus(2));
  RunConfig cfg;
  cfg.corpus = dir.path() / "corpus";
  cfg.out = dir.path() / "out";
  std::ostringstream log;
  CHECK(run_analyze(cfg, log) == 1);
  CHECK(log.str().find("insufficient subjects") != std::string::npos);
}

TEST_CASE("validate against truth", "[pipeline]") {
  testing::TempDir dir("validate");
  synthesize_corpus(dir.path() / "corpus", small_corpus(3));
  RunConfig cfg;
  cfg.corpus = dir.path() / "corpus";
  std::ostringstream out;
  CHECK(run_validate(cfg, out) == 0);
  CHECK(out.str().find("validation passed") != std::string::npos);

  // Tamper with one subject's recorded lag.
  const auto truth_path = dir.path() / "corpus" / "S001" / "truth.json";
  auto truth = nlohmann::json::parse(slurp(truth_path));
  truth["lag_samples"] = truth["lag_samples"].get<long>() + 25;
  {
    std::ofstream(truth_path) << truth.dump();
  }
  std::ostringstream broken;
  CHECK(run_validate(cfg, broken) != 0);
  CHECK(broken.str().find("FAIL") != std::string::npos);
}

TEST_CASE("missing and empty corpora", "[pipeline]") {
  testing::TempDir dir("empty");
  RunConfig cfg;
  cfg.corpus = dir.path();
  cfg.out = dir.path() / "out";
  std::ostringstream log;
  CHECK(run_analyze(cfg, log) != 0);
  CHECK(run_validate(cfg, log) != 0);
  CHECK_THROWS_AS(discover_corpus(dir.path() / "nope"), IoError);
}
