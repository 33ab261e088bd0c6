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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crymodal/fft.hpp"
#include "crymodal/pitch.hpp"
#include "crymodal/waveform.hpp"

namespace crymodal {

enum class Measure { kF0, kJitterCv, kJitterLocal, kShimmerCv, kShimmerLocal, kCpp, kHnr };

inline constexpr std::size_t kMeasureCount = 7;
inline constexpr std::array<Measure, kMeasureCount> kAllMeasures{
    Measure::kF0,           Measure::kJitterCv, Measure::kJitterLocal, Measure::kShimmerCv,
    Measure::kShimmerLocal, Measure::kCpp,      Measure::kHnr};

// Column-style name, e.g. "f0_hz", "s_cv_pct".
std::string_view to_string(Measure m);

struct AnalysisWindow {
  std::size_t segment_index = 0;  // index into the recording's segment list
  std::size_t window_index = 0;   // position inside the segment
  double start_s = 0.0;
  double end_s = 0.0;

  double centre_s() const noexcept { return 0.5 * (start_s + end_s); }
};

// Contiguous windows of window_s inside every cry_only segment whose MIC RMS
// reaches rms_gate. The trailing remainder of a segment is dropped. The same
// windows apply to both channels.
std::vector<AnalysisWindow> make_windows(std::span<const LabeledSegment> segments,
                                         const Waveform& mic, double rms_gate,
                                         double window_s = 0.050);

struct CycleSeries {
  std::vector<double> periods_s;
  std::vector<double> amplitudes;
};

struct CycleOptions {
  double iqr_fence = 1.5;
  bool smooth_periods = true;
  bool filter_amplitudes = true;
};

// Periods between consecutive instants of one voiced run lying inside
// [start_s, end_s), and the peak-to-peak amplitude around each inside
// instant. The amplitude span of an instant runs from the midpoint with its
// predecessor to the midpoint with its successor, so it holds one pulse.
// Periods (and, optionally, amplitudes) outside the IQR fences are dropped;
// periods are then smoothed with a three-point average when enabled.
//
// Throws InsufficientDataError when fewer than three periods or amplitudes
// survive.
CycleSeries cycle_series(const Waveform& w, const PointProcess& pp, double start_s, double end_s,
                         const CycleOptions& opts = {});

// All four return percentages. Fewer than three values (two for
// shimmer_local) raise InsufficientDataError; a non-positive mean amplitude
// raises DegenerateError.
double jitter_cv(const CycleSeries& c);
double jitter_local(const CycleSeries& c);
double shimmer_cv(const CycleSeries& c);
double shimmer_local(const CycleSeries& c);

// Cepstral peak prominence of the 40.96 ms Hamming frame centred in
// [start_s, end_s). Throws DomainError when the frame leaves the signal and
// DegenerateError when it is silent.
struct CepstralPeak {
  double prominence_db = 0.0;
  double quefrency_s = 0.0;
};

class CepstralAnalyzer {
 public:
  explicit CepstralAnalyzer(double sample_rate_hz);
  CepstralPeak peak(const Waveform& w, double start_s, double end_s);
  double cpp_db(const Waveform& w, double start_s, double end_s);

 private:
  double fs_;
  std::size_t frame_;
  RealFft fft_;
  std::vector<double> window_;
};

double cpp(const Waveform& w, double start_s, double end_s);

// 10 log10(r / (1 - r)) with r the harmonic strength at the window centre;
// absent when r is below the voicing threshold.
std::optional<double> hnr(const Waveform& w, double start_s, double end_s, const PitchParams& p);

struct WindowMeasures {
  std::array<std::optional<double>, kMeasureCount> values{};

  std::optional<double>& operator[](Measure m) { return values[static_cast<std::size_t>(m)]; }
  const std::optional<double>& operator[](Measure m) const {
    return values[static_cast<std::size_t>(m)];
  }
};

// One channel prepared for window measurement.
struct ChannelAnalysis {
  const Waveform* wave = nullptr;
  PitchTrack track;
  PointProcess points;
};

ChannelAnalysis analyze_channel(const Waveform& w, const PitchParams& p);

// Absent fields encode failure; this never throws for in-range windows.
WindowMeasures measure_window(const ChannelAnalysis& ch, const AnalysisWindow& window,
                              const PitchParams& p, const CycleOptions& opts,
                              CepstralAnalyzer& cepstrum);

struct WindowRow {
  std::string subject_id;
  AgeGroup age_group = AgeGroup::kM4;
  std::size_t segment = 0;
  std::size_t window = 0;
  Modality modality = Modality::kMic;
  WindowMeasures measures;
};

}  // namespace crymodal
