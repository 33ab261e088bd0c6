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

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "crymodal/config.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/pipeline.hpp"
#include "crymodal/synth.hpp"

namespace {

using crymodal::RunConfig;

// Flags that map one-to-one onto configuration keys.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::string> extra;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help + " (config key " + key + ")");
  }

  void add_common(CLI::App* app) {
    app->add_option("--config", config_file, "Flat key = value configuration file");
    add(app, "--corpus", "corpus", "Corpus root directory");
    add(app, "--seed", "seed", "Seed for segment sampling");
    add(app, "--workers", "workers", "Subjects processed in parallel");
    add(app, "--tier", "tier", "Annotation tier name (default: first interval tier)");
    add(app, "--max-lag", "max_lag_s", "Largest MIC/ACC offset searched, seconds");
    add(app, "--rms-gate", "rms_gate", "Minimum MIC RMS of an analyzed segment");
    add(app, "--pitch-floor", "pitch.floor_hz", "Pitch floor, Hz");
    add(app, "--pitch-ceiling", "pitch.ceiling_hz", "Pitch ceiling, Hz");
    app->add_option("--set", extra, "Any configuration key as key=value (repeatable)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) crymodal::apply_config_file(cfg, config_file);
    for (const auto& [k, v] : values) crymodal::apply_setting(cfg, k, v);
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw crymodal::ParseError(0, "--set expects key=value, got '" + kv + "'");
      crymodal::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

int run_synth(const std::string& out, const crymodal::CorpusOptions& opts) {
  const auto subjects = crymodal::synthesize_corpus(out, opts);
  std::cout << fmt::format("{:<6} {:>4} {:>8} {:>8} {:>9} {:>7} {:>6} {:>7}\n", "id", "age", "f0_hz", "jitter%",
                           "shimmer%", "hnr_db", "lag", "cycles");
  for (const auto& s : subjects) {
    const auto& t = s.truth;
    std::cout << fmt::format("{:<6} {:>4} {:>8.2f} {:>8.3f} {:>9.3f} {:>7} {:>6} {:>7}\n", s.subject_id,
                             crymodal::to_string(s.age_group), t.mean_f0_hz, 100.0 * t.jitter_cv,
                             100.0 * t.shimmer_cv, t.hnr_db ? fmt::format("{:.1f}", *t.hnr_db) : "-", t.lag_samples,
                             t.instants_s.size());
  }
  std::cout << fmt::format("wrote {} subjects to {}\n", subjects.size(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microphone / accelerometer infant-cry agreement analysis"};
  app.require_subcommand(1);

  ConfigFlags analyze_flags;
  auto* analyze = app.add_subcommand("analyze", "Measure a corpus and write agreement reports");
  analyze_flags.add_common(analyze);
  analyze_flags.add(analyze, "--out", "out", "Output directory");
  analyze_flags.add(analyze, "--segments-per-subject", "segments_per_subject", "Segments sampled per subject");
  analyze_flags.add(analyze, "--sampling-unit", "sampling.unit", "segments or windows");
  analyze->add_flag_callback(
      "--bias-all-measures", [&] { analyze_flags.values["bias_all_measures"] = "true"; },
      "Run bias tests for every measure, not only those below the ICC gate");

  ConfigFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "Compare measurements of a synthetic corpus with its truth files");
  validate_flags.add_common(validate);

  crymodal::CorpusOptions synth_opts;
  std::string synth_out = "corpus";
  bool noiseless = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic paired corpus with ground truth");
  synth->add_option("--out", synth_out, "Corpus root to create")->capture_default_str();
  synth->add_option("--subjects", synth_opts.subjects, "Number of subjects")->capture_default_str();
  synth->add_option("--seed", synth_opts.seed, "Generator seed")->capture_default_str();
  synth->add_option("--duration", synth_opts.duration_s, "Recording length, seconds")->capture_default_str();
  synth->add_option("--f0-min", synth_opts.f0_hz.lo, "Lowest base F0, Hz")->capture_default_str();
  synth->add_option("--f0-max", synth_opts.f0_hz.hi, "Highest base F0, Hz")->capture_default_str();
  synth->add_option("--jitter-min", synth_opts.jitter_cv.lo, "Lowest period CV (fraction)")->capture_default_str();
  synth->add_option("--jitter-max", synth_opts.jitter_cv.hi, "Highest period CV (fraction)")->capture_default_str();
  synth->add_option("--shimmer-min", synth_opts.shimmer_cv.lo, "Lowest gain CV (fraction)")->capture_default_str();
  synth->add_option("--shimmer-max", synth_opts.shimmer_cv.hi, "Highest gain CV (fraction)")->capture_default_str();
  synth->add_option("--hnr-min", synth_opts.hnr_db->lo, "Lowest MIC HNR, dB")->capture_default_str();
  synth->add_option("--hnr-max", synth_opts.hnr_db->hi, "Highest MIC HNR, dB")->capture_default_str();
  synth->add_flag("--noiseless", noiseless, "Add no broadband noise");
  synth->add_option("--lag-min", synth_opts.lag_samples.lo, "Smallest channel lag, samples")->capture_default_str();
  synth->add_option("--lag-max", synth_opts.lag_samples.hi, "Largest channel lag, samples")->capture_default_str();
  synth->add_option("--drift-min", synth_opts.f0_drift.lo, "Smallest F0 modulation depth")->capture_default_str();
  synth->add_option("--drift-max", synth_opts.f0_drift.hi, "Largest F0 modulation depth")->capture_default_str();
  synth->add_option("--acc-shimmer-scale", synth_opts.acc_shimmer_scale, "ACC gain deviation relative to MIC")
      ->capture_default_str();
  synth->add_flag("--acc-copy-of-mic", synth_opts.acc_copy_of_mic, "Make ACC an exact copy of MIC");
  synth->add_option("--mic-rate", synth_opts.mic_rate_hz, "MIC sample rate, Hz")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*analyze) return crymodal::run_analyze(analyze_flags.resolve(), std::cerr);
    if (*validate) return crymodal::run_validate(validate_flags.resolve(), std::cout);
    if (*synth) {
      if (noiseless) synth_opts.hnr_db.reset();
      return run_synth(synth_out, synth_opts);
    }
  } catch (const crymodal::ParseError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
