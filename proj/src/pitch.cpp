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

#include "crymodal/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "crymodal/dsp.hpp"
#include "crymodal/errors.hpp"

namespace crymodal {
namespace {

constexpr int kLagTaps = 16;
constexpr int kExtremumTaps = 12;
constexpr double kMaxStrength = 1.0 - 1e-9;
constexpr double kRescoreMargin = 0.15;

struct FrameGeometry {
  long span;     // reference segment length in samples
  long min_lag;
  long max_lag;
  long before;   // samples needed before the frame centre
  long after;    // samples needed after it
};

FrameGeometry geometry(const PitchParams& p, double fs) {
  FrameGeometry g{};
  g.span = std::lround(2.0 * fs / p.floor_hz);
  g.max_lag = static_cast<long>(std::ceil(fs / p.floor_hz));
  g.min_lag = std::max(1L, static_cast<long>(std::floor(fs / p.ceiling_hz)));
  // Reference segment plus interpolation taps reaching left of short lags.
  g.before = g.span + kLagTaps;
  // Reference segment, largest lag plus its right neighbour, interpolation taps.
  g.after = g.max_lag + 2 + kLagTaps;
  return g;
}

double dot(const double* a, const double* b, long n) {
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

class FrameAnalyzer {
 public:
  FrameAnalyzer(std::span<const double> x, double fs, const PitchParams& p)
      : x_(x), fs_(fs), p_(p), g_(geometry(p, fs)),
        r_(static_cast<std::size_t>(g_.max_lag + 2)), shifted_(static_cast<std::size_t>(g_.span)) {}

  const FrameGeometry& geo() const { return g_; }

  bool fits(long centre) const {
    return centre - g_.before >= 0 && centre + g_.after <= static_cast<long>(x_.size());
  }

  struct Result {
    std::optional<double> f0;
    double strength = 0.0;
  };

  Result analyze(long centre) {
    start_ = centre - g_.span;
    const double* seg = x_.data() + start_;
    e0_ = dot(seg, seg, g_.span);
    if (!(e0_ > 0.0)) return {};
    for (long lag = 0; lag <= g_.max_lag + 1; ++lag) {
      const double* lagged = seg + lag;
      const double el = dot(lagged, lagged, g_.span);
      r_[static_cast<std::size_t>(lag)] = el > 0.0 ? dot(seg, lagged, g_.span) / std::sqrt(e0_ * el) : 0.0;
    }

    // Parabolic estimates rank the candidates; those close to the best are
    // re-scored after sub-sample refinement, since integer lags can sample a
    // sharp correlation peak well below its top.
    std::vector<std::pair<long, double>> candidates;
    double best_rough = -1e300;
    for (long lag = g_.min_lag; lag <= g_.max_lag; ++lag) {
      const double a = r_[static_cast<std::size_t>(lag - 1)];
      const double b = r_[static_cast<std::size_t>(lag)];
      const double c = r_[static_cast<std::size_t>(lag + 1)];
      if (!(b > a && b >= c && b > 0.0)) continue;
      const double den = a - 2.0 * b + c;
      const double dx = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
      const double f = fs_ / (static_cast<double>(lag) + dx);
      if (f < p_.floor_hz || f > p_.ceiling_hz) continue;
      const double rv = b - 0.25 * (a - c) * dx;
      const double score = rv - p_.octave_cost * std::log2(p_.ceiling_hz / f);
      candidates.emplace_back(lag, score);
      best_rough = std::max(best_rough, score);
    }
    if (candidates.empty()) return {};

    double lag = 0.0;
    double r = 0.0;
    double best_score = -1e300;
    for (const auto& [cand, rough] : candidates) {
      if (rough < best_rough - kRescoreMargin) continue;
      const auto [q, rq] = refine(cand);
      const double score = rq - p_.octave_cost * std::log2(p_.ceiling_hz * q / fs_);
      if (score > best_score) {
        best_score = score;
        lag = q;
        r = rq;
      }
    }

    Result out;
    out.strength = std::clamp(r, 0.0, kMaxStrength);
    const double f = fs_ / lag;
    if (out.strength >= p_.voicing_threshold && f >= p_.floor_hz && f <= p_.ceiling_hz) out.f0 = f;
    return out;
  }

 private:
  // Correlation with the copy delayed by a fractional lag q.
  double r_at(double q) {
    const auto whole = static_cast<long>(std::floor(q));
    const double frac = q - static_cast<double>(whole);
    std::fill(shifted_.begin(), shifted_.end(), 0.0);
    const double* base = x_.data() + start_ + whole;
    for (int k = -kLagTaps + 1; k <= kLagTaps; ++k) {
      const double d = frac - k;
      const double s = d == 0.0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
      const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * d / (kLagTaps + 0.5));
      const double coeff = s * w;
      const double* src = base + k;
      for (long i = 0; i < g_.span; ++i) shifted_[static_cast<std::size_t>(i)] += coeff * src[i];
    }
    const double* seg = x_.data() + start_;
    const double el = dot(shifted_.data(), shifted_.data(), g_.span);
    return el > 0.0 ? dot(seg, shifted_.data(), g_.span) / std::sqrt(e0_ * el) : 0.0;
  }

  std::pair<double, double> refine(long lag) {
    const double a = r_[static_cast<std::size_t>(lag - 1)];
    const double b = r_[static_cast<std::size_t>(lag)];
    const double c = r_[static_cast<std::size_t>(lag + 1)];
    const double den = a - 2.0 * b + c;
    double q = static_cast<double>(lag) + (den != 0.0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0);
    for (double h : {0.2, 0.04, 0.008}) {
      const double ra = r_at(q - h);
      const double rb = r_at(q);
      const double rc = r_at(q + h);
      const double d2 = ra - 2.0 * rb + rc;
      const double dx = d2 < 0.0 ? std::clamp(0.5 * (ra - rc) / d2, -1.0, 1.0) : 0.0;
      q += dx * h;
    }
    q = std::clamp(q, static_cast<double>(lag) - 1.0, static_cast<double>(lag) + 1.0);
    return {q, r_at(q)};
  }

  std::span<const double> x_;
  double fs_;
  PitchParams p_;
  FrameGeometry g_;
  std::vector<double> r_;
  std::vector<double> shifted_;
  long start_ = 0;
  double e0_ = 0.0;
};

}  // namespace

void validate(const PitchParams& p, double fs) {
  if (!(p.floor_hz > 0.0 && p.floor_hz < p.ceiling_hz && p.ceiling_hz < fs / 2.0))
    throw DomainError("pitch parameters must satisfy 0 < floor < ceiling < fs/2");
  if (!(p.time_step_s > 0.0)) throw DomainError("pitch time step must be positive");
  if (!(p.voicing_threshold > 0.0 && p.voicing_threshold < 1.0))
    throw DomainError("voicing threshold must lie in (0, 1)");
  if (!(p.octave_cost >= 0.0)) throw DomainError("octave cost must be non-negative");
}

std::optional<std::size_t> PitchTrack::frame_at(double t_s) const {
  if (frame_times_s.empty() || time_step_s <= 0.0) return std::nullopt;
  const double pos = (t_s - frame_times_s.front()) / time_step_s;
  const auto i = std::lround(pos);
  if (i < 0 || i >= static_cast<long>(frame_times_s.size())) return std::nullopt;
  return static_cast<std::size_t>(i);
}

PitchTrack track_pitch(const Waveform& w, const PitchParams& p) {
  validate(p, w.sample_rate_hz);
  const double fs = w.sample_rate_hz;
  if (w.duration_s() < 2.0 / p.floor_hz)
    throw DomainError("track_pitch: signal shorter than the analysis window");
  FrameAnalyzer analyzer(w.samples, fs, p);
  const auto& g = analyzer.geo();

  PitchTrack track;
  track.time_step_s = p.time_step_s;
  const auto first = static_cast<long>(std::ceil(static_cast<double>(g.before) / fs / p.time_step_s));
  for (long i = std::max(0L, first);; ++i) {
    const double t = static_cast<double>(i) * p.time_step_s;
    const long centre = std::lround(t * fs);
    if (centre - g.before < 0) continue;
    if (!analyzer.fits(centre)) break;
    const auto res = analyzer.analyze(centre);
    track.frame_times_s.push_back(t);
    track.f0_hz.push_back(res.f0);
    track.strength.push_back(res.strength);
  }
  if (track.frame_times_s.empty())
    throw DomainError("track_pitch: analysis window longer than the signal");
  return track;
}

double harmonic_strength(const Waveform& w, double t_s, const PitchParams& p) {
  validate(p, w.sample_rate_hz);
  FrameAnalyzer analyzer(w.samples, w.sample_rate_hz, p);
  const long centre = std::lround(t_s * w.sample_rate_hz);
  if (t_s < 0.0 || !analyzer.fits(centre))
    throw DomainError("harmonic_strength: analysis window does not fit at this time");
  return analyzer.analyze(centre).strength;
}

PointProcess extract_point_process(const Waveform& w, const PitchTrack& track,
                                   const PitchParams& p) {
  PointProcess pp;
  const double fs = w.sample_rate_hz;
  const std::span<const double> x(w.samples);
  const long n = static_cast<long>(x.size());
  const long margin = kExtremumTaps + 1;
  const double min_step = 0.8 * fs / p.ceiling_hz;

  std::size_t run_id = 0;
  std::size_t i = 0;
  while (i < track.size()) {
    if (!track.f0_hz[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < track.size() && track.f0_hz[j + 1]) ++j;

    const double half_step = 0.5 * track.time_step_s;
    const long lo = std::max(margin, std::lround((track.frame_times_s[i] - half_step) * fs));
    const long hi = std::min(n - 1 - margin, std::lround((track.frame_times_s[j] + half_step) * fs));
    auto period_at = [&](long sample) {
      const double t = static_cast<double>(sample) / fs;
      const auto k = std::clamp<long>(
          std::lround((t - track.frame_times_s.front()) / track.time_step_s),
          static_cast<long>(i), static_cast<long>(j));
      return fs / *track.f0_hz[static_cast<std::size_t>(k)];
    };

    if (hi - lo >= 2) {
      const auto first = x.begin() + lo;
      const auto last = x.begin() + hi + 1;
      const auto [mn, mx] = std::minmax_element(first, last);
      const bool positive = *mx >= -*mn;
      const double sign = positive ? 1.0 : -1.0;
      auto best_in = [&](long a, long b) {
        long best = a;
        for (long k = a + 1; k <= b; ++k)
          if (sign * x[static_cast<std::size_t>(k)] > sign * x[static_cast<std::size_t>(best)]) best = k;
        return best;
      };

      const long anchor = positive ? static_cast<long>(mx - x.begin()) : static_cast<long>(mn - x.begin());
      std::vector<long> picks{anchor};
      for (long cur = anchor;;) {
        const double period = period_at(cur);
        const long a = static_cast<long>(std::ceil(cur + std::max(0.75 * period, min_step)));
        const long b = static_cast<long>(std::floor(cur + 1.25 * period));
        if (b > hi || a > b) break;
        cur = best_in(a, b);
        picks.push_back(cur);
      }
      for (long cur = anchor;;) {
        const double period = period_at(cur);
        const long a = static_cast<long>(std::ceil(cur - 1.25 * period));
        const long b = static_cast<long>(std::floor(cur - std::max(0.75 * period, min_step)));
        if (a < lo || a > b) break;
        cur = best_in(a, b);
        picks.push_back(cur);
      }
      std::sort(picks.begin(), picks.end());
      for (long k : picks) {
        const double t = dsp::refine_extremum(x, k, positive, kExtremumTaps).position / fs;
        if (!pp.instants_s.empty() && t <= pp.instants_s.back()) continue;
        pp.instants_s.push_back(t);
        pp.run.push_back(run_id);
      }
      ++run_id;
    }
    i = j + 1;
  }
  return pp;
}

}  // namespace crymodal
