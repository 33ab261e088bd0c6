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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crymodal/waveform.hpp"

namespace crymodal {

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SynthSpec {
  double duration_s = 2.0;
  double f0_hz = 450.0;
  // Slow sinusoidal F0 modulation: f(t) = f0 (1 + drift sin(2 pi rate t)).
  double f0_drift = 0.0;
  double drift_rate_hz = 1.7;
  double jitter_cv = 0.0;
  double shimmer_cv = 0.0;
  // Periodic-to-noise power ratio of the MIC channel; ACC gets 4 dB more.
  // Absent means noiseless.
  std::optional<double> hnr_db;
  // Positive delays ACC relative to MIC; negative delays MIC.
  long lag_samples = 0;
  double acc_lowpass_hz = 1000.0;
  // ACC gain deviations are the MIC deviations times this factor.
  double acc_shimmer_scale = 1.0;
  // ACC becomes an exact copy of the (noisy) MIC channel.
  bool acc_copy_of_mic = false;
  // Rate of the returned MIC waveform; ACC is always at the analysis rate.
  double mic_rate_hz = 11025.0;
  // Stretches of phonation. Empty means one stretch over the whole signal.
  std::vector<Interval> voiced;
  // Stretches where extra broadband noise is mixed in.
  std::vector<Interval> noisy;
  double extra_noise_rms = 0.05;
  std::uint64_t seed = 0;
};

// Throws DomainError unless the perturbation CVs lie in [0, 0.2], the
// duration is at least 0.5 s and f0 lies in [200, 1500] Hz.
void validate(const SynthSpec& spec);

struct SynthTruth {
  // Pulse instants on the MIC timeline, after the lag is applied.
  std::vector<double> instants_s;
  // Index of the voiced stretch each pulse belongs to.
  std::vector<std::size_t> stretch;
  std::vector<double> gains;
  std::vector<double> acc_gains;
  // Periods between consecutive pulses of the same stretch.
  std::vector<double> periods_s;
  long lag_samples = 0;
  double mean_f0_hz = 0.0;
  double jitter_cv = 0.0;   // realised sample CV of periods
  double shimmer_cv = 0.0;  // realised population CV of gains
  double acc_shimmer_cv = 0.0;
  std::optional<double> hnr_db;
  double f0_drift = 0.0;
};

struct SynthPair {
  Waveform mic;
  Waveform acc;
  SynthTruth truth;
};

// Pulse train with per-cycle period and gain perturbations, shaped by a
// decaying source pulse and then by a zero-phase two-resonance kernel (MIC)
// or a zero-phase Gaussian low-pass (ACC). The voiced RMS of each channel is
// 0.1 before noise is added.
SynthPair synthesize_pair(const SynthSpec& spec);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct CorpusOptions {
  std::size_t subjects = 10;
  double duration_s = 8.0;
  std::uint64_t seed = 1;
  Range f0_hz{350.0, 550.0};
  Range jitter_cv{0.005, 0.03};
  Range shimmer_cv{0.03, 0.10};
  std::optional<Range> hnr_db = Range{22.0, 32.0};
  Range lag_samples{-400.0, 400.0};
  Range f0_drift{0.0, 0.01};
  double acc_shimmer_scale = 1.0;
  bool acc_copy_of_mic = false;
  double mic_rate_hz = 11025.0;
};

struct SubjectTruth {
  std::string subject_id;
  AgeGroup age_group = AgeGroup::kM4;
  SynthSpec spec;
  SynthTruth truth;
};

// Writes <root>/<subject>/{mic.wav, acc.wav, labels.TextGrid, meta.json,
// truth.json}. Subjects alternate between the m4 and m12 groups. Output is a
// function of the options alone.
std::vector<SubjectTruth> synthesize_corpus(const std::filesystem::path& root,
                                            const CorpusOptions& opts);

// Cry bouts of 0.6-1.4 s separated by 0.2-0.5 s pauses. Every fourth bout is
// labelled cry+noise; pauses carry an empty label.
std::vector<LabeledSegment> make_bouts(double duration_s, std::uint64_t seed);

}  // namespace crymodal
