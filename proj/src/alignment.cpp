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

#include "crymodal/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "crymodal/errors.hpp"
#include "crymodal/fft.hpp"

namespace crymodal {
namespace {

// Squared magnitude of the band-pass mask at frequency f.
double band_gain_sq(double f, double lo, double hi, double nyquist) {
  const double lo_width = 0.5 * lo;
  const double hi_width = std::min(0.25 * hi, std::max(0.0, nyquist - hi));
  double g = 1.0;
  if (f < lo - lo_width) {
    g = 0.0;
  } else if (f < lo) {
    g = 0.5 - 0.5 * std::cos(std::numbers::pi * (f - (lo - lo_width)) / lo_width);
  } else if (f > hi + hi_width) {
    g = 0.0;
  } else if (f > hi) {
    g = hi_width > 0.0 ? 0.5 + 0.5 * std::cos(std::numbers::pi * (f - hi) / hi_width) : 0.0;
  }
  return g * g;
}

std::vector<double> centred(const Waveform& w) {
  std::vector<double> x = w.samples;
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= m;
  return x;
}

bool all_zero(const Waveform& w) {
  return std::all_of(w.samples.begin(), w.samples.end(), [](double v) { return v == 0.0; });
}

}  // namespace

SyncResult estimate_lag(const Waveform& mic, const Waveform& acc, const SyncParams& params) {
  if (mic.sample_rate_hz != acc.sample_rate_hz)
    throw DomainError("estimate_lag: channels have different sample rates");
  if (!(params.max_lag_s >= 0.0)) throw DomainError("estimate_lag: max lag must be non-negative");
  if (!(params.band_lo_hz > 0.0 && params.band_lo_hz < params.band_hi_hz))
    throw DomainError("estimate_lag: band edges must satisfy 0 < lo < hi");
  const double fs = mic.sample_rate_hz;
  const auto max_lag = static_cast<long>(std::floor(params.max_lag_s * fs));
  if (static_cast<long>(mic.size()) <= max_lag || static_cast<long>(acc.size()) <= max_lag)
    throw DomainError("estimate_lag: signals must be longer than the maximum lag");
  if (all_zero(mic)) throw DegenerateError("estimate_lag: MIC channel is all zero");
  if (all_zero(acc)) throw DegenerateError("estimate_lag: ACC channel is all zero");

  const std::size_t n = next_pow2(mic.size() + acc.size());
  RealFft fft(n);
  const auto m_spec = fft.forward(centred(mic));
  const auto a_spec = fft.forward(centred(acc));

  std::vector<std::complex<double>> cross(m_spec.size());
  double e_mic = 0.0;
  double e_acc = 0.0;
  for (std::size_t k = 0; k < cross.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    const double g2 = band_gain_sq(f, params.band_lo_hz, params.band_hi_hz, fs / 2.0);
    cross[k] = std::conj(m_spec[k]) * a_spec[k] * g2;
    // Interior bins stand for a conjugate pair.
    const double mult = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    e_mic += mult * std::norm(m_spec[k]) * g2;
    e_acc += mult * std::norm(a_spec[k]) * g2;
  }
  e_mic /= static_cast<double>(n);
  e_acc /= static_cast<double>(n);
  const double norm = std::sqrt(e_mic * e_acc);
  if (!(norm > 0.0)) throw DegenerateError("estimate_lag: no energy inside the correlation band");

  const auto corr = fft.inverse(cross);
  SyncResult best{0, -2.0};
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    const auto idx = lag >= 0 ? static_cast<std::size_t>(lag) : n - static_cast<std::size_t>(-lag);
    const double r = corr[idx] / norm;
    if (r > best.peak_correlation) best = {lag, r};
  }
  best.peak_correlation = std::clamp(best.peak_correlation, -1.0, 1.0);
  return best;
}

RecordingPair apply_lag(RecordingPair pair, const SyncResult& sync) {
  const long lag = sync.lag_samples;
  const auto shift = static_cast<std::size_t>(std::labs(lag));
  if (shift >= pair.mic.size() || shift >= pair.acc.size())
    throw DomainError("apply_lag: lag exceeds signal length");
  if (lag > 0) {
    pair.acc.samples.erase(pair.acc.samples.begin(), pair.acc.samples.begin() + lag);
  } else if (lag < 0) {
    pair.mic.samples.erase(pair.mic.samples.begin(),
                           pair.mic.samples.begin() + static_cast<long>(shift));
  }
  const std::size_t common = std::min(pair.mic.size(), pair.acc.size());
  pair.mic.samples.resize(common);
  pair.acc.samples.resize(common);

  const double offset = lag < 0 ? static_cast<double>(shift) / pair.mic.sample_rate_hz : 0.0;
  const double end = pair.mic.duration_s();
  std::vector<LabeledSegment> kept;
  for (auto seg : pair.segments) {
    seg.start_s = std::max(0.0, seg.start_s - offset);
    seg.end_s = std::min(end, seg.end_s - offset);
    if (seg.end_s > seg.start_s) kept.push_back(std::move(seg));
  }
  pair.segments = std::move(kept);
  return pair;
}

}  // namespace crymodal
