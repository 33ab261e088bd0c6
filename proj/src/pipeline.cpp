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

#include "crymodal/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "crymodal/agreement.hpp"
#include "crymodal/dsp.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/recording.hpp"
#include "crymodal/report_io.hpp"
#include "json.hpp"

namespace crymodal {
namespace {

using Json = nlohmann::ordered_json;

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

AgeGroup read_age_group(const std::filesystem::path& dir) {
  const auto meta = read_json(dir / "meta.json");
  if (!meta.contains("age_group") || !meta["age_group"].is_string())
    throw FormatError((dir / "meta.json").string() + ": missing age_group");
  return parse_age_group(meta["age_group"].get<std::string>());
}

}  // namespace

std::vector<SubjectEntry> discover_corpus(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) throw IoError("corpus root is not a directory: " + root.string());
  std::vector<SubjectEntry> out;
  for (const auto& entry : std::filesystem::directory_iterator(root, ec))
    if (entry.is_directory()) out.push_back({entry.path().filename().string(), entry.path()});
  if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });
  return out;
}

SubjectResult process_subject(const SubjectEntry& entry, const RunConfig& cfg) {
  SubjectResult res;
  res.subject_id = entry.subject_id;
  try {
    const AgeGroup age = read_age_group(entry.dir);
    res.age_group = age;
    const std::optional<std::string> tier = cfg.tier.empty() ? std::nullopt : std::optional(cfg.tier);
    auto pair = load_recording_pair(entry.dir / "mic.wav", entry.dir / "acc.wav", entry.dir / "labels.TextGrid",
                                    entry.subject_id, age, tier);
    res.sync = estimate_lag(pair.mic, pair.acc, cfg.sync);
    pair = apply_lag(std::move(pair), res.sync);
    res.segments = pair.segments.size();
    res.windows = make_windows(pair.segments, pair.mic, cfg.rms_gate, cfg.window_s);

    const auto mic = analyze_channel(pair.mic, cfg.pitch);
    const auto acc = analyze_channel(pair.acc, cfg.pitch);
    CepstralAnalyzer cepstrum(pair.mic.sample_rate_hz);
    for (const auto& w : res.windows) {
      for (const auto* ch : {&mic, &acc}) {
        WindowRow row;
        row.subject_id = entry.subject_id;
        row.age_group = age;
        row.segment = w.segment_index;
        row.window = w.window_index;
        row.modality = ch == &mic ? Modality::kMic : Modality::kAcc;
        row.measures = measure_window(*ch, w, cfg.pitch, cfg.cycles, cepstrum);
        res.rows.push_back(std::move(row));
      }
    }
    res.ok = true;
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
    res.rows.clear();
  }
  return res;
}

std::vector<SubjectResult> process_corpus(const std::vector<SubjectEntry>& entries, const RunConfig& cfg) {
  std::vector<SubjectResult> results(entries.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, entries.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) results[i] = process_subject(entries[i], cfg);
  };
  if (workers == 1) {
    work();
    return results;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return results;
}

int run_analyze(const RunConfig& cfg, std::ostream& log) {
  try {
    validate(cfg);
    const auto entries = discover_corpus(cfg.corpus);
    const auto results = process_corpus(entries, cfg);

    std::vector<WindowRow> raw;
    std::size_t ok = 0;
    Json subjects = Json::array();
    for (const auto& r : results) {
      Json s;
      s["subject_id"] = r.subject_id;
      s["age_group"] = r.age_group ? Json(std::string(to_string(*r.age_group))) : Json(nullptr);
      s["status"] = r.ok ? "ok" : "failed";
      if (r.ok) {
        ++ok;
        s["sync"] = {{"lag_samples", r.sync.lag_samples}, {"peak_correlation", r.sync.peak_correlation}};
        s["segments"] = r.segments;
        s["windows"] = r.windows.size();
        raw.insert(raw.end(), r.rows.begin(), r.rows.end());
      } else {
        s["error"] = r.error;
        log << fmt::format("skipping subject {}: {}\n", r.subject_id, r.error);
      }
      subjects.push_back(std::move(s));
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out.string() + ": " + ec.message());

    Json manifest;
    manifest["tool"] = "crymodal";
    manifest["version"] = "0.1.0";
    Json config;
    for (const auto& [k, v] : config_entries(cfg)) config[k] = v;
    manifest["config"] = config;
    manifest["subjects"] = subjects;

    if (ok < kMinSubjects) {
      const auto msg = fmt::format("insufficient subjects: {} of {} analyzed, at least {} required", ok,
                                   results.size(), kMinSubjects);
      log << msg << "\n";
      manifest["status"] = "failed";
      manifest["error"] = msg;
      write_text_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
      return 1;
    }

    const auto octave = octave_error_rate(raw);
    const auto cleaned = exclude_outliers(raw, cfg.outlier_sigmas);
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (Measure m : kAllMeasures)
        if (raw[i].measures[m] && !cleaned[i].measures[m]) ++excluded;
    const auto sampled = sample_segments(cleaned, cfg.segments_per_subject, cfg.seed, cfg.sampling_unit);
    const auto summaries = summarize_subjects(sampled);
    const auto reports = build_reports(summaries, {cfg.bias_gate_icc, cfg.bias_all_measures});

    const std::vector<std::pair<std::string, std::string>> files{
        {"window_measures.csv", window_measures_csv(raw)},
        {"icc_report.csv", icc_report_csv(reports.icc)},
        {"bias_report.csv", bias_report_csv(reports.bias)},
        {"histograms_2d.csv", histogram_2d_csv(histogram_2d(sampled))},
        {"histograms_diff.csv", histogram_diff_csv(histogram_diff(sampled))},
    };
    for (const auto& [name, text] : files) write_text_file(cfg.out / name, text);

    manifest["status"] = "ok";
    manifest["counts"] = {{"subjects_total", results.size()},
                          {"subjects_analyzed", ok},
                          {"window_rows", raw.size()},
                          {"values_excluded_as_outliers", excluded},
                          {"window_rows_after_sampling", sampled.size()},
                          {"icc_rows", reports.icc.size()},
                          {"bias_rows", reports.bias.size()}};
    if (octave) {
      manifest["octave_errors"] = {{"paired_windows", octave->pairs},
                                   {"halving_fraction", octave->halving},
                                   {"doubling_fraction", octave->doubling}};
    } else {
      manifest["octave_errors"] = nullptr;
    }
    Json degenerate = Json::array();
    for (const auto& b : reports.bias)
      if (b.stats.degenerate)
        degenerate.push_back({{"measure", std::string(to_string(b.measure))}, {"age_group", std::string(to_string(b.age))}});
    manifest["degenerate_bias_tests"] = degenerate;
    Json outputs = Json::array();
    for (const auto& [name, text] : files) outputs.push_back(name);
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    manifest["warnings"] = reports.warnings;
    write_text_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& w : reports.warnings) log << "warning: " << w << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct Check {
  std::string subject;
  std::string name;
  double measured;
  double expected;
  double tolerance;
  bool relative;
  bool pass;
};

// MIC rows in window order.
std::vector<const WindowRow*> mic_rows(const SubjectResult& r) {
  std::vector<const WindowRow*> out;
  for (const auto& row : r.rows)
    if (row.modality == Modality::kMic) out.push_back(&row);
  return out;
}

}  // namespace

int run_validate(const RunConfig& base, std::ostream& out) {
  try {
    RunConfig cfg = base;
    cfg.cycles.smooth_periods = false;
    validate(cfg);
    const auto entries = discover_corpus(cfg.corpus);
    if (entries.empty()) throw InsufficientDataError("corpus is empty: " + cfg.corpus.string());
    const auto results = process_corpus(entries, cfg);

    std::vector<Check> checks;
    bool failed = false;
    for (std::size_t s = 0; s < entries.size(); ++s) {
      const auto& res = results[s];
      if (!res.ok) {
        out << fmt::format("{:<8} {:<10} FAIL  {}\n", res.subject_id, "load", res.error);
        failed = true;
        continue;
      }
      const auto truth = read_json(entries[s].dir / "truth.json");
      const auto& spec = truth.at("spec");
      const long lag = truth.at("lag_samples").get<long>();
      auto add = [&](std::string name, double measured, double expected, double tol, bool relative) {
        const double err = relative ? std::abs(measured - expected) / std::abs(expected) : std::abs(measured - expected);
        checks.push_back({res.subject_id, std::move(name), measured, expected, tol, relative, err <= tol});
      };
      add("lag", static_cast<double>(res.sync.lag_samples), static_cast<double>(lag), 1.0, false);

      // Truth instants on the synchronized MIC timeline.
      const double shift = res.sync.lag_samples < 0 ? static_cast<double>(-res.sync.lag_samples) / kAnalysisRateHz : 0.0;
      auto instants = truth.at("instants_s").get<std::vector<double>>();
      for (double& t : instants) t -= shift;
      const auto gains = truth.at("gains").get<std::vector<double>>();

      std::vector<double> f0_meas, f0_true, j_meas, j_true, s_meas, s_true, hnr_meas;
      const auto rows = mic_rows(res);
      for (std::size_t w = 0; w < res.windows.size() && w < rows.size(); ++w) {
        const auto& win = res.windows[w];
        const auto& m = rows[w]->measures;
        std::vector<double> periods, g;
        for (std::size_t i = 0; i < instants.size(); ++i) {
          if (instants[i] < win.start_s || instants[i] >= win.end_s) continue;
          g.push_back(gains[i]);
          if (i + 1 < instants.size() && instants[i + 1] < win.end_s) periods.push_back(instants[i + 1] - instants[i]);
        }
        if (m[Measure::kF0] && !periods.empty()) {
          double inv = 0.0;
          for (double p : periods) inv += 1.0 / p;
          f0_meas.push_back(*m[Measure::kF0]);
          f0_true.push_back(inv / static_cast<double>(periods.size()));
        }
        if (m[Measure::kJitterCv] && periods.size() >= 3) {
          j_meas.push_back(*m[Measure::kJitterCv]);
          j_true.push_back(100.0 * dsp::sample_std(periods) / dsp::mean(periods));
        }
        if (m[Measure::kShimmerCv] && g.size() >= 3) {
          s_meas.push_back(*m[Measure::kShimmerCv]);
          s_true.push_back(100.0 * dsp::population_std(g) / dsp::mean(g));
        }
        if (m[Measure::kHnr]) hnr_meas.push_back(*m[Measure::kHnr]);
      }
      if (f0_meas.empty()) {
        out << fmt::format("{:<8} {:<10} FAIL  no voiced windows\n", res.subject_id, "f0");
        failed = true;
        continue;
      }
      add("f0_hz", dsp::mean(f0_meas), dsp::mean(f0_true), 1.0, false);
      const double jitter = spec.at("jitter_cv").get<double>();
      if (jitter >= 0.005 && jitter <= 0.05 && !j_meas.empty())
        add("j_cv_pct", dsp::mean(j_meas), dsp::mean(j_true), 0.2, true);
      if (spec.at("shimmer_cv").get<double>() >= 0.01 && !s_meas.empty())
        add("s_cv_pct", dsp::mean(s_meas), dsp::mean(s_true), 0.2, true);
      const auto& hnr_spec = spec.at("hnr_db");
      if (!hnr_spec.is_null() && jitter <= 1e-3 && spec.at("f0_drift").get<double>() == 0.0 && !hnr_meas.empty())
        add("hnr_db", dsp::quantile(hnr_meas, 0.5), hnr_spec.get<double>(), 1.5, false);
    }

    for (const auto& c : checks) {
      out << fmt::format("{:<8} {:<10} {}  measured {:.4f} expected {:.4f} tolerance {}{}\n", c.subject, c.name,
                         c.pass ? "PASS" : "FAIL", c.measured, c.expected, c.relative ? c.tolerance * 100.0 : c.tolerance,
                         c.relative ? "%" : "");
      failed = failed || !c.pass;
    }
    out << (failed ? "validation FAILED\n" : "validation passed\n");
    return failed ? 1 : 0;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace crymodal
