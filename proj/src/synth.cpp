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

#include "crymodal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "crymodal/dsp.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/recording.hpp"
#include "crymodal/signal_ops.hpp"
#include "crymodal/textgrid.hpp"
#include "crymodal/wav_io.hpp"
#include "json.hpp"

namespace crymodal {
namespace {

constexpr int kOversample = 16;
constexpr double kSourceDecayS = 0.15e-3;
constexpr double kFormantSigmaS = 0.3e-3;
constexpr double kTargetRms = 0.1;
constexpr double kAccSnrBonusDb = 4.0;
constexpr double kEdgeGuardS = 0.005;

// Portable random source: the standard distributions are not bit-specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Per-pulse kernel (decaying source pulse then a zero-phase shaping kernel)
// and the index of the pulse instant inside it.
struct PulseKernel {
  std::vector<double> taps;
  long origin = 0;
};

PulseKernel make_kernel(double fs, const std::vector<double>& shaping) {
  const auto decay_len = static_cast<std::size_t>(8.0 * kSourceDecayS * fs);
  std::vector<double> source(decay_len);
  for (std::size_t k = 0; k < decay_len; ++k)
    source[k] = std::exp(-static_cast<double>(k) / (kSourceDecayS * fs));
  return {convolve(source, shaping), static_cast<long>(shaping.size() / 2)};
}

std::vector<double> formant_kernel(double fs) {
  const auto half = static_cast<long>(4.0 * kFormantSigmaS * fs);
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  for (long i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double env = std::exp(-t * t / (2.0 * kFormantSigmaS * kFormantSigmaS));
    k[static_cast<std::size_t>(i + half)] =
        env * (std::cos(2.0 * std::numbers::pi * 1100.0 * t) + 0.5 * std::cos(2.0 * std::numbers::pi * 3300.0 * t));
  }
  return k;
}

std::vector<double> lowpass_kernel(double fs, double cutoff_hz) {
  // Gaussian whose magnitude response is 1/sqrt(2) at the cutoff.
  const double sigma = std::sqrt(std::log(2.0)) / (2.0 * std::numbers::pi * cutoff_hz);
  const auto half = static_cast<long>(5.0 * sigma * fs);
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  for (long i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / fs;
    k[static_cast<std::size_t>(i + half)] = std::exp(-t * t / (2.0 * sigma * sigma));
  }
  return k;
}

void add_pulse(std::vector<double>& out, const PulseKernel& k, long at, double gain) {
  const long first = at - k.origin;
  for (std::size_t j = 0; j < k.taps.size(); ++j) {
    const long idx = first + static_cast<long>(j);
    if (idx >= 0 && idx < static_cast<long>(out.size())) out[static_cast<std::size_t>(idx)] += gain * k.taps[j];
  }
}

double voiced_rms(const Waveform& w, const std::vector<Interval>& voiced) {
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& iv : voiced) {
    const auto a = static_cast<std::size_t>(std::clamp<long>(std::lround(iv.start_s * w.sample_rate_hz), 0, static_cast<long>(w.size())));
    const auto b = static_cast<std::size_t>(std::clamp<long>(std::lround(iv.end_s * w.sample_rate_hz), 0, static_cast<long>(w.size())));
    for (std::size_t i = a; i < b; ++i) acc += w.samples[i] * w.samples[i];
    count += b > a ? b - a : 0;
  }
  return count > 0 ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
}

void delay(std::vector<double>& x, long n) {
  if (n <= 0) return;
  const auto shift = std::min(static_cast<std::size_t>(n), x.size());
  std::copy_backward(x.begin(), x.end() - static_cast<long>(shift), x.end());
  std::fill(x.begin(), x.begin() + static_cast<long>(shift), 0.0);
}

void add_noise(std::vector<double>& x, double sigma, Rng& rng) {
  for (double& v : x) v += sigma * rng.normal();
}

void add_noise(std::vector<double>& x, double fs, const std::vector<Interval>& where, double sigma, Rng& rng) {
  for (const auto& iv : where) {
    const auto a = std::clamp<long>(std::lround(iv.start_s * fs), 0, static_cast<long>(x.size()));
    const auto b = std::clamp<long>(std::lround(iv.end_s * fs), 0, static_cast<long>(x.size()));
    for (long i = a; i < b; ++i) x[static_cast<std::size_t>(i)] += sigma * rng.normal();
  }
}

double cv(const std::vector<double>& v, bool sample) {
  if (v.size() < 2) return 0.0;
  const double sd = sample ? dsp::sample_std(v) : dsp::population_std(v);
  return sd / dsp::mean(v);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void validate(const SynthSpec& s) {
  if (!(s.duration_s >= 0.5)) throw DomainError("synth: duration must be at least 0.5 s");
  if (!(s.f0_hz >= 200.0 && s.f0_hz <= 1500.0)) throw DomainError("synth: f0 must lie in [200, 1500] Hz");
  if (!(s.jitter_cv >= 0.0 && s.jitter_cv <= 0.2)) throw DomainError("synth: jitter_cv must lie in [0, 0.2]");
  if (!(s.shimmer_cv >= 0.0 && s.shimmer_cv <= 0.2)) throw DomainError("synth: shimmer_cv must lie in [0, 0.2]");
  if (!(s.f0_drift >= 0.0 && s.f0_drift < 0.5)) throw DomainError("synth: drift must lie in [0, 0.5)");
  if (!(s.acc_lowpass_hz > 0.0)) throw DomainError("synth: ACC low-pass cutoff must be positive");
  if (!(s.mic_rate_hz > 0.0)) throw DomainError("synth: MIC rate must be positive");
  const double lag_s = std::abs(static_cast<double>(s.lag_samples)) / kAnalysisRateHz;
  if (lag_s >= 0.5 * s.duration_s) throw DomainError("synth: lag must be shorter than half the duration");
}

SynthPair synthesize_pair(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const double fs = kAnalysisRateHz;
  const double fs_int = fs * kOversample;
  const auto n_int = static_cast<std::size_t>(std::lround(spec.duration_s * fs_int));
  std::vector<Interval> voiced = spec.voiced;
  if (voiced.empty()) voiced.push_back({0.0, spec.duration_s});

  SynthTruth truth;
  std::vector<double> mic_int(n_int, 0.0), acc_int(n_int, 0.0);
  const auto mic_kernel = make_kernel(fs_int, formant_kernel(fs_int));
  const auto acc_kernel = make_kernel(fs_int, lowpass_kernel(fs_int, spec.acc_lowpass_hz));
  for (std::size_t v = 0; v < voiced.size(); ++v) {
    double t = voiced[v].start_s + kEdgeGuardS;
    const double stop = std::min(voiced[v].end_s, spec.duration_s) - kEdgeGuardS;
    while (t < stop) {
      const long at = std::lround(t * fs_int);
      const double xi = rng.normal();
      const double g = 1.0 + spec.shimmer_cv * xi;
      const double ga = 1.0 + spec.shimmer_cv * spec.acc_shimmer_scale * xi;
      add_pulse(mic_int, mic_kernel, at, g);
      add_pulse(acc_int, acc_kernel, at, ga);
      const double actual = static_cast<double>(at) / fs_int;
      if (!truth.instants_s.empty() && truth.stretch.back() == v)
        truth.periods_s.push_back(actual - truth.instants_s.back());
      truth.instants_s.push_back(actual);
      truth.stretch.push_back(v);
      truth.gains.push_back(g);
      truth.acc_gains.push_back(ga);
      const double f = spec.f0_hz * (1.0 + spec.f0_drift * std::sin(2.0 * std::numbers::pi * spec.drift_rate_hz * t));
      t += (1.0 / f) * (1.0 + spec.jitter_cv * rng.normal());
    }
  }

  Waveform mic = resample(Waveform{std::move(mic_int), fs_int}, fs);
  Waveform acc = resample(Waveform{std::move(acc_int), fs_int}, fs);
  const double mic_rms = voiced_rms(mic, voiced);
  const double acc_rms = voiced_rms(acc, voiced);
  for (double& v : mic.samples) v *= mic_rms > 0.0 ? kTargetRms / mic_rms : 0.0;
  for (double& v : acc.samples) v *= acc_rms > 0.0 ? kTargetRms / acc_rms : 0.0;

  // Shift before adding noise so the delayed channel has noise throughout.
  const long lag = spec.lag_samples;
  if (lag > 0) delay(acc.samples, lag);
  if (lag < 0) {
    delay(mic.samples, -lag);
    const double shift = static_cast<double>(-lag) / fs;
    for (double& t : truth.instants_s) t += shift;
  }
  const double mic_shift = lag < 0 ? static_cast<double>(-lag) / fs : 0.0;
  const double acc_shift = lag > 0 ? static_cast<double>(lag) / fs : 0.0;
  auto shifted = [](std::vector<Interval> v, double by) {
    for (auto& iv : v) {
      iv.start_s += by;
      iv.end_s += by;
    }
    return v;
  };

  if (spec.hnr_db) {
    add_noise(mic.samples, kTargetRms * std::pow(10.0, -*spec.hnr_db / 20.0), rng);
    add_noise(acc.samples, kTargetRms * std::pow(10.0, -(*spec.hnr_db + kAccSnrBonusDb) / 20.0), rng);
  }
  if (!spec.noisy.empty()) {
    add_noise(mic.samples, fs, shifted(spec.noisy, mic_shift), spec.extra_noise_rms, rng);
    add_noise(acc.samples, fs, shifted(spec.noisy, acc_shift), 0.25 * spec.extra_noise_rms, rng);
  }
  if (spec.acc_copy_of_mic) acc = mic;
  if (spec.mic_rate_hz != fs) mic = resample(mic, spec.mic_rate_hz);

  truth.lag_samples = lag;
  truth.hnr_db = spec.hnr_db;
  truth.f0_drift = spec.f0_drift;
  if (!truth.periods_s.empty()) {
    double inv = 0.0;
    for (double p : truth.periods_s) inv += 1.0 / p;
    truth.mean_f0_hz = inv / static_cast<double>(truth.periods_s.size());
  }
  truth.jitter_cv = cv(truth.periods_s, true);
  truth.shimmer_cv = cv(truth.gains, false);
  truth.acc_shimmer_cv = cv(spec.acc_copy_of_mic ? truth.gains : truth.acc_gains, false);
  return {std::move(mic), std::move(acc), std::move(truth)};
}

std::vector<LabeledSegment> make_bouts(double duration_s, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSegment> out;
  auto push = [&out](double a, double b, Label label) {
    if (b <= a) return;
    LabeledSegment s;
    s.start_s = a;
    s.end_s = b;
    s.label = label;
    out.push_back(s);
  };
  const double tail = 0.1;
  double t = 0.2;
  push(0.0, t, Label::kNonCry);
  std::size_t bout = 0;
  while (t + 0.6 <= duration_s - tail) {
    const double len = std::min(rng.uniform(0.6, 1.4), duration_s - tail - t);
    ++bout;
    push(t, t + len, bout % 4 == 0 ? Label::kCryNoise : Label::kCryOnly);
    t += len;
    const double pause = std::min(rng.uniform(0.2, 0.5), duration_s - t);
    push(t, t + pause, Label::kNonCry);
    t += pause;
  }
  push(t, duration_s, Label::kNonCry);
  return out;
}

namespace {

nlohmann::json truth_json(const SubjectTruth& s) {
  nlohmann::json j;
  j["subject_id"] = s.subject_id;
  j["age_group"] = std::string(to_string(s.age_group));
  nlohmann::json spec;
  spec["duration_s"] = s.spec.duration_s;
  spec["f0_hz"] = s.spec.f0_hz;
  spec["f0_drift"] = s.spec.f0_drift;
  spec["jitter_cv"] = s.spec.jitter_cv;
  spec["shimmer_cv"] = s.spec.shimmer_cv;
  spec["hnr_db"] = s.spec.hnr_db ? nlohmann::json(*s.spec.hnr_db) : nlohmann::json(nullptr);
  spec["lag_samples"] = s.spec.lag_samples;
  spec["acc_lowpass_hz"] = s.spec.acc_lowpass_hz;
  spec["acc_shimmer_scale"] = s.spec.acc_shimmer_scale;
  spec["acc_copy_of_mic"] = s.spec.acc_copy_of_mic;
  spec["mic_rate_hz"] = s.spec.mic_rate_hz;
  spec["seed"] = s.spec.seed;
  j["spec"] = spec;
  const auto& t = s.truth;
  j["lag_samples"] = t.lag_samples;
  j["mean_f0_hz"] = t.mean_f0_hz;
  j["jitter_cv"] = t.jitter_cv;
  j["shimmer_cv"] = t.shimmer_cv;
  j["acc_shimmer_cv"] = t.acc_shimmer_cv;
  j["hnr_db"] = t.hnr_db ? nlohmann::json(*t.hnr_db) : nlohmann::json(nullptr);
  j["f0_drift"] = t.f0_drift;
  j["cycles"] = t.instants_s.size();
  j["instants_s"] = t.instants_s;
  j["gains"] = t.gains;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<SubjectTruth> synthesize_corpus(const std::filesystem::path& root, const CorpusOptions& opts) {
  if (opts.subjects == 0) throw DomainError("synthesize_corpus: need at least one subject");
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError("cannot create corpus directory " + root.string() + ": " + ec.message());

  std::vector<SubjectTruth> out;
  for (std::size_t i = 0; i < opts.subjects; ++i) {
    Rng draw(mix(opts.seed, i));
    SubjectTruth s;
    s.subject_id = fmt::format("S{:03d}", i + 1);
    s.age_group = i % 2 == 0 ? AgeGroup::kM4 : AgeGroup::kM12;
    auto pick = [&draw](const Range& r) { return r.hi > r.lo ? draw.uniform(r.lo, r.hi) : r.lo; };
    SynthSpec& spec = s.spec;
    spec.duration_s = opts.duration_s;
    spec.f0_hz = pick(opts.f0_hz);
    spec.jitter_cv = pick(opts.jitter_cv);
    spec.shimmer_cv = pick(opts.shimmer_cv);
    if (opts.hnr_db) spec.hnr_db = pick(*opts.hnr_db);
    spec.lag_samples = std::lround(pick(opts.lag_samples));
    spec.f0_drift = pick(opts.f0_drift);
    spec.acc_shimmer_scale = opts.acc_shimmer_scale;
    spec.acc_copy_of_mic = opts.acc_copy_of_mic;
    spec.mic_rate_hz = opts.mic_rate_hz;
    spec.seed = mix(opts.seed, 1000 + i);

    auto segments = make_bouts(opts.duration_s, mix(opts.seed, 2000 + i));
    for (const auto& seg : segments) {
      if (seg.label == Label::kCryOnly) spec.voiced.push_back({seg.start_s, seg.end_s});
      if (seg.label == Label::kCryNoise) {
        spec.voiced.push_back({seg.start_s, seg.end_s});
        spec.noisy.push_back({seg.start_s, seg.end_s});
      }
    }
    auto pair = synthesize_pair(spec);
    s.truth = std::move(pair.truth);

    // Annotations live on the MIC timeline.
    const double shift = spec.lag_samples < 0 ? static_cast<double>(-spec.lag_samples) / kAnalysisRateHz : 0.0;
    std::vector<LabeledSegment> labelled;
    if (shift > 0.0) {
      LabeledSegment lead;
      lead.start_s = 0.0;
      lead.end_s = shift;
      labelled.push_back(lead);
    }
    for (auto seg : segments) {
      seg.start_s = std::min(seg.start_s + shift, opts.duration_s);
      seg.end_s = std::min(seg.end_s + shift, opts.duration_s);
      if (seg.end_s > seg.start_s) labelled.push_back(seg);
    }

    const auto dir = root / s.subject_id;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_wav(dir / "mic.wav", pair.mic);
    write_wav(dir / "acc.wav", pair.acc);
    const std::vector<IntervalTier> tiers{{"cry", labelled}};
    write_textgrid(dir / "labels.TextGrid", tiers, 0.0, opts.duration_s);
    nlohmann::json meta{{"subject_id", s.subject_id}, {"age_group", std::string(to_string(s.age_group))}};
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    write_text(dir / "truth.json", truth_json(s).dump(2) + "\n");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace crymodal
