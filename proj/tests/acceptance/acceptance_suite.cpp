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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Measurements behind each verdict are printed as indented
// detail lines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "crymodal/agreement.hpp"
#include "crymodal/alignment.hpp"
#include "crymodal/config.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/measures.hpp"
#include "crymodal/pipeline.hpp"
#include "crymodal/pitch.hpp"
#include "crymodal/synth.hpp"
#include "crymodal/textgrid.hpp"
#include "test_support.hpp"

using namespace crymodal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects detail lines and the verdict for one criterion.
class Verdict {
 public:
  void note(std::string line) { details_.push_back(std::move(line)); }
  void require(bool ok, std::string what) {
    if (!ok) {
      pass_ = false;
      details_.push_back("failed: " + what);
    }
  }
  bool pass() const { return pass_; }
  const std::vector<std::string>& details() const { return details_; }

 private:
  bool pass_ = true;
  std::vector<std::string> details_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double relative(double got, double want) { return std::abs(got - want) / std::abs(want); }

// ---------------------------------------------------------------------------
// 1. Perturbation formulas against long-double reference code.

long double ref_mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s / static_cast<long double>(v.size());
}

long double ref_jitter_cv(const std::vector<double>& p) {
  const long double m = ref_mean(p);
  long double ss = 0.0L;
  for (double x : p) ss += (x - m) * (x - m);
  return 100.0L * std::sqrt(ss / static_cast<long double>(p.size() - 1)) / m;
}

long double ref_local(const std::vector<double>& v) {
  long double s = 0.0L;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += std::fabs(static_cast<long double>(v[i + 1]) - v[i]);
  return 100.0L * (s / static_cast<long double>(v.size() - 1)) / ref_mean(v);
}

long double ref_shimmer_cv(const std::vector<double>& a) {
  const long double m = ref_mean(a);
  long double ss = 0.0L;
  for (double x : a) ss += (x - m) * (x - m);
  return 100.0L * std::sqrt(ss / static_cast<long double>(a.size())) / m;
}

void criterion_formulas(Verdict& v) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> base(1e-3, 5e-3), spread(0.0, 0.2), amp(0.01, 2.0);
  std::normal_distribution<double> z;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng() % 60;
    const double p0 = base(rng), a0 = amp(rng), sp = spread(rng);
    CycleSeries c;
    for (std::size_t i = 0; i < n; ++i) {
      c.periods_s.push_back(p0 * std::max(0.05, 1.0 + sp * z(rng)));
      c.amplitudes.push_back(a0 * std::max(0.05, 1.0 + sp * z(rng)));
    }
    const std::pair<double, long double> checks[] = {
        {jitter_cv(c), ref_jitter_cv(c.periods_s)},
        {jitter_local(c), ref_local(c.periods_s)},
        {shimmer_cv(c), ref_shimmer_cv(c.amplitudes)},
        {shimmer_local(c), ref_local(c.amplitudes)},
    };
    for (const auto& [got, want] : checks) {
      const long double err = want == 0.0L ? std::fabs(got) : std::fabs((got - want) / want);
      worst = std::max(worst, static_cast<double>(err));
    }
  }
  const double elapsed = seconds_since(t0);
  v.note(fmt::format("1000 series, worst relative error {:.3g}, {:.3f} s", worst, elapsed));
  v.require(worst <= 1e-9, "relative error above 1e-9");
  v.require(elapsed < 5.0, "runtime not below 5 s");
}

// ---------------------------------------------------------------------------
// 2. ICC against a general two-way ANOVA written from the sums of squares.

IccValues anova_icc(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<const std::vector<double>*> cols{&x, &y};
  const std::size_t n = x.size(), k = cols.size();
  long double grand = 0.0L;
  std::vector<long double> row(n, 0.0L), col(k, 0.0L);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const long double v = (*cols[j])[i];
      grand += v;
      row[i] += v / k;
      col[j] += v / n;
    }
  grand /= static_cast<long double>(n * k);
  long double sst = 0.0L, ssr = 0.0L, ssc = 0.0L;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) sst += std::pow((*cols[j])[i] - grand, 2.0L);
  for (std::size_t i = 0; i < n; ++i) ssr += k * std::pow(row[i] - grand, 2.0L);
  for (std::size_t j = 0; j < k; ++j) ssc += n * std::pow(col[j] - grand, 2.0L);
  const long double sse = sst - ssr - ssc;
  const long double msr = ssr / (n - 1), msc = ssc / (k - 1), mse = sse / ((n - 1) * (k - 1));
  const long double kk = k, nn = n;
  return {static_cast<double>((msr - mse) / (msr + (kk - 1) * mse + kk / nn * (msc - mse))),
          static_cast<double>((msr - mse) / (msr + (kk - 1) * mse))};
}

void criterion_icc(Verdict& v) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 3, 4, 5};
  const auto ex = icc(x, y);
  v.note(fmt::format("worked example: A1 {:.10f}, C1 {:.10f}", ex.a1, ex.c1));
  v.require(std::abs(ex.a1 - 10.0 / 13.0) <= 1e-9, "worked example A1");
  v.require(std::abs(ex.c1 - 1.0) <= 1e-9, "worked example C1");

  std::mt19937_64 rng(77);
  std::normal_distribution<double> z;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 3 + rng() % 50;
    const double scale = std::exp(2.0 * z(rng)), offset = 10.0 * z(rng), noise = std::abs(z(rng));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = scale * z(rng);
      b[i] = a[i] + scale * (offset * 0.1 + noise * z(rng));
    }
    const auto got = icc(a, b);
    const auto want = anova_icc(a, b);
    worst = std::max({worst, std::abs(got.a1 - want.a1), std::abs(got.c1 - want.c1)});
  }
  v.note(fmt::format("500 random tables, worst absolute difference {:.3g}", worst));
  v.require(worst <= 1e-9, "random tables differ by more than 1e-9");
}

// ---------------------------------------------------------------------------
// 3. Pitch accuracy on stationary synthetic cries.

void criterion_pitch(Verdict& v) {
  for (double f0 : {250.0, 450.0, 700.0, 1200.0}) {
    double abs_err = 0.0;
    std::size_t voiced = 0, frames = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SynthSpec s;
      s.duration_s = 1.5;
      s.f0_hz = f0;
      s.hnr_db = 30.0;
      s.seed = seed;
      const auto pair = synthesize_pair(s);
      const auto track = track_pitch(pair.mic, PitchParams{});
      for (std::size_t i = 0; i < track.size(); ++i) {
        const double t = track.frame_times_s[i];
        if (t < 0.05 || t > s.duration_s - 0.05) continue;
        ++frames;
        if (!track.f0_hz[i]) continue;
        ++voiced;
        abs_err += std::abs(*track.f0_hz[i] - pair.truth.mean_f0_hz);
      }
    }
    const double frac = static_cast<double>(voiced) / static_cast<double>(frames);
    const double mae = voiced ? abs_err / static_cast<double>(voiced) : INFINITY;
    v.note(fmt::format("{:.0f} Hz: MAE {:.3f} Hz, voiced {:.1f}% of {} frames", f0, mae, 100.0 * frac, frames));
    v.require(mae <= 1.0, fmt::format("{:.0f} Hz MAE", f0));
    v.require(frac >= 0.95, fmt::format("{:.0f} Hz voiced fraction", f0));
  }

  // 100 Hz: a pulse train shaped like the synthetic source, and a
  // band-limited sawtooth.
  Waveform pulses{std::vector<double>(static_cast<std::size_t>(1.5 * 11025.0), 0.0), 11025.0};
  for (double t0 = 0.005; t0 < 1.49; t0 += 0.01) {
    const auto first = static_cast<std::size_t>(std::lround(t0 * 11025.0));
    for (std::size_t i = first; i < std::min(pulses.size(), first + 60); ++i) {
      const double t = static_cast<double>(i - first) / 11025.0;
      pulses.samples[i] += std::exp(-t / 8e-4) * std::sin(2.0 * std::numbers::pi * 1100.0 * t);
    }
  }
  for (const auto& [name, w] : {std::pair{"pulse train", pulses},
                                std::pair{"sawtooth", testing::sawtooth(100.0, 11025.0, 1.5)}}) {
    const auto track = track_pitch(w, PitchParams{});
    const auto voiced = std::count_if(track.f0_hz.begin(), track.f0_hz.end(), [](const auto& f) { return f.has_value(); });
    const double frac = static_cast<double>(voiced) / static_cast<double>(track.size());
    v.note(fmt::format("100 Hz {}: voiced {:.1f}% of {} frames", name, 100.0 * frac, track.size()));
    v.require(frac <= 0.05, fmt::format("100 Hz {} not unvoiced", name));
  }
}

// ---------------------------------------------------------------------------
// Shared per-window measurement over a synthetic recording.

struct WindowStats {
  std::vector<double> measured;
  std::vector<double> truth;
};

// Truth statistics over the pulses lying inside [t0, t1), matching how the
// measurement forms its periods and amplitudes.
double truth_jitter(const SynthTruth& tr, double t0, double t1) {
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < tr.instants_s.size(); ++i)
    if (tr.instants_s[i] >= t0 && tr.instants_s[i + 1] < t1 && tr.stretch[i] == tr.stretch[i + 1])
      p.push_back(tr.instants_s[i + 1] - tr.instants_s[i]);
  return jitter_cv(CycleSeries{p, {1.0, 1.0, 1.0}});
}

double truth_shimmer(const SynthTruth& tr, double t0, double t1) {
  std::vector<double> g;
  for (std::size_t i = 0; i < tr.instants_s.size(); ++i)
    if (tr.instants_s[i] >= t0 && tr.instants_s[i] < t1) g.push_back(tr.gains[i]);
  return shimmer_cv(CycleSeries{{1.0, 1.0, 1.0}, g});
}

// ---------------------------------------------------------------------------
// 4. Perturbation recovery on the MIC-like channel.

void criterion_perturbation(Verdict& v) {
  CycleOptions raw;
  raw.smooth_periods = false;
  const PitchParams p;
  const std::pair<double, double> levels[] = {{0.005, 0.02}, {0.02, 0.06}, {0.05, 0.12}};
  for (const auto& [jit, shim] : levels) {
    std::vector<double> j_meas, j_true, s_meas, s_true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthSpec s;
      s.duration_s = 4.0;
      s.f0_hz = 350.0 + 40.0 * static_cast<double>(seed);
      s.jitter_cv = jit;
      s.shimmer_cv = shim;
      s.hnr_db = 30.0;
      s.seed = 100 + seed;
      const auto pair = synthesize_pair(s);
      const auto ch = analyze_channel(pair.mic, p);
      CepstralAnalyzer ceps(pair.mic.sample_rate_hz);
      for (double t = 0.1; t + 0.05 <= s.duration_s - 0.1; t += 0.05) {
        const auto m = measure_window(ch, AnalysisWindow{0, 0, t, t + 0.05}, p, raw, ceps);
        if (m[Measure::kJitterCv]) {
          j_meas.push_back(*m[Measure::kJitterCv]);
          j_true.push_back(truth_jitter(pair.truth, t, t + 0.05));
        }
        if (m[Measure::kShimmerCv]) {
          s_meas.push_back(*m[Measure::kShimmerCv]);
          s_true.push_back(truth_shimmer(pair.truth, t, t + 0.05));
        }
      }
    }
    auto avg = [](const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); };
    const double jm = avg(j_meas), jt = avg(j_true), sm = avg(s_meas), st = avg(s_true);
    v.note(fmt::format("target J {:.1f}% S {:.0f}%: J_CV {:.3f} (window truth {:.3f}), S_CV {:.3f} (window truth {:.3f}), {} windows",
                       100.0 * jit, 100.0 * shim, jm, jt, sm, st, j_meas.size()));
    v.require(relative(jm, 100.0 * jit) <= 0.2, fmt::format("J_CV vs target {:.1f}%", 100.0 * jit));
    v.require(relative(jm, jt) <= 0.2, fmt::format("J_CV vs window truth at {:.1f}%", 100.0 * jit));
    v.require(relative(sm, 100.0 * shim) <= 0.2, fmt::format("S_CV vs target {:.0f}%", 100.0 * shim));
    v.require(relative(sm, st) <= 0.2, fmt::format("S_CV vs window truth at {:.0f}%", 100.0 * shim));
  }
}

// ---------------------------------------------------------------------------
// 5. HNR accuracy and noise monotonicity of HNR and CPP.

struct NoiseMedians {
  double hnr = 0.0;
  double cpp = 0.0;
  std::size_t hnr_windows = 0;
};

NoiseMedians noise_medians(double hnr_db, double jitter, double shimmer) {
  const PitchParams p;
  std::vector<double> h, c;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthSpec s;
    s.duration_s = 2.0;
    s.f0_hz = 400.0 + 20.0 * static_cast<double>(seed);
    s.jitter_cv = jitter;
    s.shimmer_cv = shimmer;
    s.hnr_db = hnr_db;
    s.seed = 300 + seed;
    const auto pair = synthesize_pair(s);
    CepstralAnalyzer ceps(pair.mic.sample_rate_hz);
    for (double t = 0.1; t + 0.05 <= s.duration_s - 0.1; t += 0.05) {
      if (const auto x = hnr(pair.mic, t, t + 0.05, p)) h.push_back(*x);
      c.push_back(ceps.cpp_db(pair.mic, t, t + 0.05));
    }
  }
  return {h.empty() ? -INFINITY : median(h), median(c), h.size()};
}

void criterion_noise(Verdict& v) {
  for (double target : {5.0, 10.0, 20.0}) {
    const auto m = noise_medians(target, 0.0, 0.0);
    v.note(fmt::format("target {:.0f} dB: median HNR {:.2f} dB over {} windows", target, m.hnr, m.hnr_windows));
    v.require(std::abs(m.hnr - target) <= 1.5, fmt::format("HNR at {:.0f} dB target", target));
  }
  std::vector<NoiseMedians> sweep;
  const double snrs[] = {30.0, 20.0, 10.0, 5.0};
  for (double snr : snrs) sweep.push_back(noise_medians(snr, 0.01, 0.04));
  for (std::size_t i = 0; i < sweep.size(); ++i)
    v.note(fmt::format("sweep {:.0f} dB: median HNR {:.2f}, median CPP {:.2f}", snrs[i], sweep[i].hnr, sweep[i].cpp));
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    v.require(sweep[i].hnr < sweep[i - 1].hnr, fmt::format("HNR not decreasing at {:.0f} dB", snrs[i]));
    v.require(sweep[i].cpp < sweep[i - 1].cpp, fmt::format("CPP not decreasing at {:.0f} dB", snrs[i]));
  }
}

// ---------------------------------------------------------------------------
// 6. Lag recovery. A perfectly periodic pair is ambiguous by whole periods,
// so the sources carry cycle-to-cycle perturbation.

void add_noise(Waveform& w, double snr_db, std::uint64_t seed) {
  double power = 0.0;
  for (double x : w.samples) power += x * x;
  power /= static_cast<double>(w.size());
  const auto noise = testing::white_noise(w.sample_rate_hz, w.duration_s(), std::sqrt(power * std::pow(10.0, -snr_db / 10.0)), seed);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] += noise.samples[i];
}

void criterion_sync(Verdict& v) {
  for (long lag : {-500L, -57L, 0L, 137L, 500L}) {
    std::vector<long> clean, noisy;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SynthSpec s;
      s.duration_s = 4.0;
      s.f0_hz = 380.0 + 30.0 * static_cast<double>(seed);
      s.jitter_cv = 0.01;
      s.shimmer_cv = 0.04;
      s.lag_samples = lag;
      s.seed = 500 + seed;
      auto pair = synthesize_pair(s);
      clean.push_back(estimate_lag(pair.mic, pair.acc).lag_samples);
      add_noise(pair.mic, 10.0, 900 + seed);
      add_noise(pair.acc, 10.0, 950 + seed);
      noisy.push_back(estimate_lag(pair.mic, pair.acc).lag_samples);
    }
    v.note(fmt::format("lag {}: clean {} {} {}, 10 dB {} {} {}", lag, clean[0], clean[1], clean[2], noisy[0], noisy[1], noisy[2]));
    for (long got : clean) v.require(got == lag, fmt::format("clean lag {}", lag));
    for (long got : noisy) v.require(std::labs(got - lag) <= 1, fmt::format("10 dB lag {}", lag));
  }
}

// ---------------------------------------------------------------------------
// 7 and 8. End-to-end runs over synthetic corpora.

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("missing column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

RunConfig corpus_config(const std::filesystem::path& corpus, const std::filesystem::path& out) {
  RunConfig cfg;
  cfg.corpus = corpus;
  cfg.out = out;
  cfg.workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  return cfg;
}

void criterion_end_to_end(Verdict& v, const std::filesystem::path& scratch) {
  const auto t0 = Clock::now();
  std::ostringstream log;

  CorpusOptions same;
  same.acc_copy_of_mic = true;
  synthesize_corpus(scratch / "copy", same);
  auto cfg = corpus_config(scratch / "copy", scratch / "copy_out");
  v.require(run_analyze(cfg, log) == 0, "analyze on copied corpus");
  {
    const auto rows = read_csv(cfg.out / "icc_report.csv");
    const auto& h = rows.at(0);
    const auto cm = column(h, "measure"), cs = column(h, "scope"), ca = column(h, "icc_a1"), cc = column(h, "icc_c1");
    std::size_t overall = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][cs] != "overall") continue;
      ++overall;
      const double a = std::stod(rows[i][ca]), c = std::stod(rows[i][cc]);
      v.note(fmt::format("copy {}: A1 {:.6f} C1 {:.6f}", rows[i][cm], a, c));
      v.require(std::abs(a - 1.0) <= 1e-3 && std::abs(c - 1.0) <= 1e-3, "copied ICC " + rows[i][cm]);
    }
    v.require(overall == kMeasureCount, fmt::format("copied corpus has {} overall ICC rows", overall));
  }

  CorpusOptions attenuated;
  attenuated.acc_shimmer_scale = 0.5;
  synthesize_corpus(scratch / "atten", attenuated);
  cfg = corpus_config(scratch / "atten", scratch / "atten_out");
  cfg.bias_all_measures = true;
  v.require(run_analyze(cfg, log) == 0, "analyze on attenuated corpus");
  {
    const auto rows = read_csv(cfg.out / "icc_report.csv");
    const auto& h = rows.at(0);
    const auto cm = column(h, "measure"), cs = column(h, "scope"), ca = column(h, "icc_a1"), cc = column(h, "icc_c1");
    bool seen = false;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i][cm] == "s_cv_pct" && rows[i][cs] == "overall") {
        seen = true;
        const double a = std::stod(rows[i][ca]), c = std::stod(rows[i][cc]);
        v.note(fmt::format("attenuated s_cv_pct: A1 {:.4f} C1 {:.4f}", a, c));
        v.require(c > a, "S_CV consistency not above agreement");
      }
    v.require(seen, "no overall S_CV ICC row");
  }
  {
    const auto rows = read_csv(cfg.out / "bias_report.csv");
    const auto& h = rows.at(0);
    const auto cm = column(h, "measure"), cg = column(h, "age_group"), cb = column(h, "bias"), cp = column(h, "p_value");
    std::size_t groups = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i][cm] == "s_cv_pct") {
        ++groups;
        const double b = std::stod(rows[i][cb]), pv = std::stod(rows[i][cp]);
        v.note(fmt::format("attenuated s_cv_pct {}: bias {:.3f} pp, p {:.3g}", rows[i][cg], b, pv));
        v.require(b < 0.0 && pv < 0.01, "S_CV bias in " + rows[i][cg]);
      }
    v.require(groups == 2, "S_CV bias rows for both age groups");
  }
  const double elapsed = seconds_since(t0);
  v.note(fmt::format("two 10-subject corpora synthesized and analyzed in {:.1f} s", elapsed));
  v.require(elapsed < 120.0, "runtime not below 2 minutes");
}

void criterion_determinism(Verdict& v, const std::filesystem::path& scratch) {
  CorpusOptions opts;
  opts.subjects = 6;
  opts.duration_s = 5.0;
  opts.seed = 42;
  synthesize_corpus(scratch / "det", opts);
  std::ostringstream log;
  auto a = corpus_config(scratch / "det", scratch / "det_a");
  auto b = corpus_config(scratch / "det", scratch / "det_b");
  a.workers = 1;
  v.require(run_analyze(a, log) == 0 && run_analyze(b, log) == 0, "analyze runs");
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.out)) {
    const auto name = entry.path().filename();
    std::string left = slurp(entry.path()), right = slurp(b.out / name);
    if (name == "manifest.json") {
      // The manifest records the output path and worker count, which differ
      // by construction between the two runs; compare with those removed.
      for (auto* text : {&left, &right}) {
        std::istringstream in(*text);
        std::string line, kept;
        while (std::getline(in, line))
          if (line.find("\"out\"") == std::string::npos && line.find("\"workers\"") == std::string::npos &&
              line.find("det_") == std::string::npos)
            kept += line + "\n";
        *text = kept;
      }
    }
    v.require(left == right, name.string() + " differs");
    ++compared;
  }
  // A repeat with identical configuration, output path included, must match
  // byte for byte, manifest too.
  const auto first = scratch / "det_a_first";
  std::filesystem::rename(a.out, first);
  v.require(run_analyze(a, log) == 0, "repeat analyze");
  for (const auto& entry : std::filesystem::directory_iterator(a.out)) {
    v.require(slurp(entry.path()) == slurp(first / entry.path().filename()),
              entry.path().filename().string() + " differs on repeat");
    ++compared;
  }
  v.note(fmt::format("{} files compared across serial, parallel and repeated runs", compared));
  v.require(compared >= 12, "expected six outputs per run");
}

// ---------------------------------------------------------------------------
// 9. TextGrid round trip and malformed fixtures.

void criterion_textgrid(Verdict& v, const std::filesystem::path& scratch) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> gap(0.0, 0.5), len(1e-3, 3.0);
  const std::vector<std::string> texts{"cry", "cry+noise", "", "laugh", "say \"ah\"", "non-cry"};
  double worst = 0.0;
  std::size_t intervals = 0, label_mismatch = 0;
  std::filesystem::create_directories(scratch / "grids");
  for (int f = 0; f < 50; ++f) {
    std::vector<IntervalTier> tiers;
    double end = 0.0;
    for (int t = 0; t < 1 + f % 3; ++t) {
      IntervalTier tier{fmt::format("tier{}", t), {}};
      double x = gap(rng);
      for (std::size_t i = 0, n = 1 + rng() % 40; i < n; ++i) {
        LabeledSegment s;
        s.start_s = x;
        s.end_s = x + len(rng);
        x = s.end_s + (rng() % 3 == 0 ? gap(rng) : 0.0);
        s.text = texts[rng() % texts.size()];
        s.label = s.text == "cry" ? Label::kCryOnly : s.text == "cry+noise" ? Label::kCryNoise : Label::kNonCry;
        s.unknown_label = s.label == Label::kNonCry && !s.text.empty();
        tier.intervals.push_back(s);
      }
      end = std::max(end, x);
      tiers.push_back(std::move(tier));
    }
    const auto path = scratch / "grids" / fmt::format("g{:02}.TextGrid", f);
    write_textgrid(path, tiers, 0.0, end + 1.0);
    const auto back = read_textgrid(path);
    if (back.size() != tiers.size()) {
      v.require(false, fmt::format("file {} tier count", f));
      continue;
    }
    for (std::size_t t = 0; t < tiers.size(); ++t) {
      if (back[t].intervals.size() != tiers[t].intervals.size() || back[t].name != tiers[t].name) {
        v.require(false, fmt::format("file {} tier {} shape", f, t));
        continue;
      }
      for (std::size_t i = 0; i < tiers[t].intervals.size(); ++i) {
        const auto& a = tiers[t].intervals[i];
        const auto& b = back[t].intervals[i];
        worst = std::max({worst, std::abs(a.start_s - b.start_s), std::abs(a.end_s - b.end_s)});
        label_mismatch += a.label != b.label || a.unknown_label != b.unknown_label || (a.unknown_label && a.text != b.text);
        ++intervals;
      }
    }
  }
  v.note(fmt::format("50 files, {} intervals, worst boundary error {:.3g} s, {} label mismatches", intervals, worst, label_mismatch));
  v.require(worst <= 1e-6, "boundary error above 1e-6 s");
  v.require(label_mismatch == 0, "labels changed");

  const std::filesystem::path fixtures = CRYMODAL_FIXTURE_DIR;
  v.require(read_textgrid(fixtures / "valid.TextGrid").at(0).intervals.size() == 2, "valid fixture");
  const std::pair<const char*, std::size_t> bad[] = {
      {"reversed_bounds.TextGrid", 19}, {"non_numeric.TextGrid", 21},   {"overlapping.TextGrid", 19},
      {"missing_text.TextGrid", 19},    {"unterminated_string.TextGrid", 18}, {"wrong_header.TextGrid", 1},
      {"missing_object_class.TextGrid", 2}, {"negative_start.TextGrid", 15},
  };
  for (const auto& [file, line] : bad) {
    try {
      read_textgrid(fixtures / file);
      v.require(false, fmt::format("{} parsed without error", file));
    } catch (const ParseError& e) {
      v.note(fmt::format("{}: ParseError at line {}", file, e.line()));
      v.require(e.line() == line, fmt::format("{} reported line {} instead of {}", file, e.line(), line));
    }
  }
  try {
    read_textgrid(fixtures / "does_not_exist.TextGrid");
    v.require(false, "missing file parsed");
  } catch (const IoError&) {
    v.note("missing file: IoError");
  }
}

}  // namespace

int main() {
  testing::TempDir scratch("acceptance");
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"perturbation formulas match reference code", criterion_formulas},
      {"ICC matches worked example and ANOVA oracle", criterion_icc},
      {"pitch accuracy and low-frequency rejection", criterion_pitch},
      {"jitter and shimmer recovery on MIC", criterion_perturbation},
      {"HNR accuracy and noise monotonicity", criterion_noise},
      {"lag recovery clean and at 10 dB", criterion_sync},
      {"end-to-end agreement on synthetic corpora", [&](Verdict& v) { criterion_end_to_end(v, scratch.path()); }},
      {"byte-identical outputs across runs", [&](Verdict& v) { criterion_determinism(v, scratch.path()); }},
      {"TextGrid round trip and malformed input", [&](Verdict& v) { criterion_textgrid(v, scratch.path()); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", v.pass() ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0));
    for (const auto& d : v.details()) fmt::print("    {}\n", d);
    std::fflush(stdout);
    failures += !v.pass();
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
