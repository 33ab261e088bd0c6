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

#include "crymodal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crymodal/dsp.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/signal_ops.hpp"

namespace crymodal {
namespace {

constexpr int kAmplitudeTaps = 12;
constexpr double kCppFrameS = 0.04096;
constexpr double kLifterS = 0.00067;
constexpr double kMaxQuefrencyS = 0.005;
constexpr double kTiny = 1e-300;

void require(std::size_t have, std::size_t need, const char* what) {
  if (have < need)
    throw InsufficientDataError(std::string(what) + ": needs at least " + std::to_string(need) +
                                " values, got " + std::to_string(have));
}

double mean_abs_diff(std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) acc += std::abs(v[i] - v[i - 1]);
  return acc / static_cast<double>(v.size() - 1);
}

double positive_mean(std::span<const double> v) {
  const double m = dsp::mean(v);
  if (!(m > 0.0)) throw DegenerateError("mean amplitude is not positive");
  return m;
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::kF0: return "f0_hz";
    case Measure::kJitterCv: return "j_cv_pct";
    case Measure::kJitterLocal: return "j_local_pct";
    case Measure::kShimmerCv: return "s_cv_pct";
    case Measure::kShimmerLocal: return "s_local_pct";
    case Measure::kCpp: return "cpp_db";
    case Measure::kHnr: return "hnr_db";
  }
  return "?";
}

std::vector<AnalysisWindow> make_windows(std::span<const LabeledSegment> segments,
                                         const Waveform& mic, double rms_gate, double window_s) {
  if (!(window_s > 0.0)) throw DomainError("window length must be positive");
  std::vector<AnalysisWindow> out;
  const double duration = mic.duration_s();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (seg.label != Label::kCryOnly || seg.unknown_label) continue;
    const double start = std::max(0.0, seg.start_s);
    const double end = std::min(duration, seg.end_s);
    if (!(end - start >= window_s)) continue;
    if (rms(mic, start, end) < rms_gate) continue;
    const auto count = static_cast<std::size_t>(std::floor((end - start) / window_s + 1e-9));
    for (std::size_t k = 0; k < count; ++k) {
      const double w0 = start + static_cast<double>(k) * window_s;
      out.push_back({s, k, w0, w0 + window_s});
    }
  }
  return out;
}

CycleSeries cycle_series(const Waveform& w, const PointProcess& pp, double start_s, double end_s,
                         const CycleOptions& opts) {
  const auto& t = pp.instants_s;
  const std::span<const double> x(w.samples);
  const double fs = w.sample_rate_hz;
  auto inside = [&](std::size_t i) { return t[i] >= start_s && t[i] < end_s; };

  std::vector<double> periods;
  std::vector<double> amplitudes;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!inside(i)) continue;
    if (i + 1 < t.size() && inside(i + 1) && pp.run[i + 1] == pp.run[i])
      periods.push_back(t[i + 1] - t[i]);
    if (i == 0 || i + 1 >= t.size() || pp.run[i - 1] != pp.run[i] || pp.run[i + 1] != pp.run[i])
      continue;
    const auto lo = static_cast<long>(std::ceil(0.5 * (t[i - 1] + t[i]) * fs));
    const auto hi = static_cast<long>(std::floor(0.5 * (t[i] + t[i + 1]) * fs));
    if (lo < 1 || hi + 1 >= static_cast<long>(x.size()) || hi - lo < 2) continue;
    const auto first = x.begin() + lo;
    const auto [mn, mx] = std::minmax_element(first, x.begin() + hi + 1);
    const double top = dsp::refine_extremum(x, mx - x.begin(), true, kAmplitudeTaps).value;
    const double bottom = dsp::refine_extremum(x, mn - x.begin(), false, kAmplitudeTaps).value;
    amplitudes.push_back(top - bottom);
  }

  CycleSeries c;
  c.periods_s = dsp::iqr_filter(periods, opts.iqr_fence);
  c.amplitudes = opts.filter_amplitudes ? dsp::iqr_filter(amplitudes, opts.iqr_fence) : amplitudes;
  require(c.periods_s.size(), 3, "cycle series periods");
  require(c.amplitudes.size(), 3, "cycle series amplitudes");
  if (opts.smooth_periods) c.periods_s = dsp::smooth3(c.periods_s);
  return c;
}

double jitter_cv(const CycleSeries& c) {
  require(c.periods_s.size(), 3, "jitter_cv");
  return 100.0 * dsp::sample_std(c.periods_s) / dsp::mean(c.periods_s);
}

double jitter_local(const CycleSeries& c) {
  require(c.periods_s.size(), 3, "jitter_local");
  return 100.0 * mean_abs_diff(c.periods_s) / dsp::mean(c.periods_s);
}

double shimmer_cv(const CycleSeries& c) {
  require(c.amplitudes.size(), 3, "shimmer_cv");
  return 100.0 * dsp::population_std(c.amplitudes) / positive_mean(c.amplitudes);
}

double shimmer_local(const CycleSeries& c) {
  require(c.amplitudes.size(), 2, "shimmer_local");
  return 100.0 * mean_abs_diff(c.amplitudes) / positive_mean(c.amplitudes);
}

CepstralAnalyzer::CepstralAnalyzer(double sample_rate_hz)
    : fs_(sample_rate_hz),
      frame_(static_cast<std::size_t>(std::lround(kCppFrameS * sample_rate_hz))),
      fft_(next_pow2(frame_)),
      window_(frame_) {
  for (std::size_t i = 0; i < frame_; ++i)
    window_[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(frame_ - 1));
}

CepstralPeak CepstralAnalyzer::peak(const Waveform& w, double start_s, double end_s) {
  if (w.sample_rate_hz != fs_) throw DomainError("cpp: sample rate differs from analyzer");
  const long centre = std::lround(0.5 * (start_s + end_s) * fs_);
  const long first = centre - static_cast<long>(frame_ / 2);
  if (first < 0 || first + static_cast<long>(frame_) > static_cast<long>(w.size()))
    throw DomainError("cpp: analysis frame extends past the signal");

  std::vector<double> frame(frame_);
  double energy = 0.0;
  for (std::size_t i = 0; i < frame_; ++i) {
    frame[i] = w.samples[static_cast<std::size_t>(first) + i] * window_[i];
    energy += frame[i] * frame[i];
  }
  if (!(energy > 0.0)) throw DegenerateError("cpp: silent frame");

  const auto spectrum = fft_.forward(frame);
  std::vector<std::complex<double>> log_power(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k)
    log_power[k] = 10.0 * std::log10(std::norm(spectrum[k]) + kTiny);
  const auto ceps = fft_.inverse(log_power);

  const std::size_t n = fft_.size();
  const auto k_lo = static_cast<std::size_t>(std::ceil(kLifterS * fs_));
  const auto k_peak_hi = std::min(n / 2, static_cast<std::size_t>(std::floor(kMaxQuefrencyS * fs_)));
  const std::size_t k_fit_hi = n / 2;
  std::vector<double> db(k_fit_hi + 1);
  for (std::size_t k = k_lo; k <= k_fit_hi; ++k) db[k] = 10.0 * std::log10(ceps[k] * ceps[k] + kTiny);

  // Least-squares baseline over the liftered range.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto count = static_cast<double>(k_fit_hi - k_lo + 1);
  for (std::size_t k = k_lo; k <= k_fit_hi; ++k) {
    const double q = static_cast<double>(k);
    sx += q;
    sy += db[k];
    sxx += q * q;
    sxy += q * db[k];
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / count;

  std::size_t peak = k_lo;
  for (std::size_t k = k_lo; k <= k_peak_hi; ++k)
    if (db[k] > db[peak]) peak = k;
  return {db[peak] - (intercept + slope * static_cast<double>(peak)), static_cast<double>(peak) / fs_};
}

double CepstralAnalyzer::cpp_db(const Waveform& w, double start_s, double end_s) {
  return peak(w, start_s, end_s).prominence_db;
}

double cpp(const Waveform& w, double start_s, double end_s) {
  CepstralAnalyzer analyzer(w.sample_rate_hz);
  return analyzer.cpp_db(w, start_s, end_s);
}

std::optional<double> hnr(const Waveform& w, double start_s, double end_s, const PitchParams& p) {
  const double r = harmonic_strength(w, 0.5 * (start_s + end_s), p);
  if (r < p.voicing_threshold) return std::nullopt;
  return 10.0 * std::log10(r / (1.0 - r));
}

ChannelAnalysis analyze_channel(const Waveform& w, const PitchParams& p) {
  ChannelAnalysis ch;
  ch.wave = &w;
  ch.track = track_pitch(w, p);
  ch.points = extract_point_process(w, ch.track, p);
  return ch;
}

WindowMeasures measure_window(const ChannelAnalysis& ch, const AnalysisWindow& window,
                              const PitchParams& p, const CycleOptions& opts,
                              CepstralAnalyzer& cepstrum) {
  WindowMeasures m;
  const auto& w = *ch.wave;

  double f0_sum = 0.0;
  std::size_t f0_count = 0;
  for (std::size_t i = 0; i < ch.track.size(); ++i) {
    const double t = ch.track.frame_times_s[i];
    if (t < window.start_s || t >= window.end_s || !ch.track.f0_hz[i]) continue;
    f0_sum += *ch.track.f0_hz[i];
    ++f0_count;
  }
  if (f0_count > 0) m[Measure::kF0] = f0_sum / static_cast<double>(f0_count);

  try {
    const auto c = cycle_series(w, ch.points, window.start_s, window.end_s, opts);
    m[Measure::kJitterCv] = jitter_cv(c);
    m[Measure::kJitterLocal] = jitter_local(c);
    m[Measure::kShimmerCv] = shimmer_cv(c);
    m[Measure::kShimmerLocal] = shimmer_local(c);
  } catch (const Error&) {
  }
  try {
    m[Measure::kCpp] = cepstrum.cpp_db(w, window.start_s, window.end_s);
  } catch (const Error&) {
  }
  try {
    m[Measure::kHnr] = hnr(w, window.start_s, window.end_s, p);
  } catch (const Error&) {
  }
  // A window with no voiced frame carries no periodicity-based measures.
  if (!m[Measure::kF0]) m[Measure::kHnr].reset();
  return m;
}

}  // namespace crymodal
