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

#include "crymodal/signal_ops.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "crymodal/errors.hpp"

namespace crymodal {
namespace {

constexpr double kStopbandDb = 70.0;

bool is_whole(double v) { return std::abs(v - std::round(v)) < 1e-9 * std::max(1.0, v); }

// Low-pass prototype sampled at the interpolated rate.
std::vector<double> design_lowpass(double fs_up, double cutoff_hz, double transition_hz,
                                   double dc_gain) {
  const double beta = 0.1102 * (kStopbandDb - 8.7);
  const double dw = 2.0 * std::numbers::pi * transition_hz / fs_up;
  auto taps = static_cast<long>(std::ceil((kStopbandDb - 8.0) / (2.285 * dw))) + 1;
  if (taps % 2 == 0) ++taps;
  const long half = taps / 2;
  const double fc = cutoff_hz / fs_up;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  std::vector<double> h(static_cast<std::size_t>(taps));
  double sum = 0.0;
  for (long i = 0; i < taps; ++i) {
    const double m = static_cast<double>(i - half);
    const double x = 2.0 * fc * m;
    const double sinc = m == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = m / static_cast<double>(half);
    const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(i)] = 2.0 * fc * sinc * win;
    sum += h[static_cast<std::size_t>(i)];
  }
  for (double& v : h) v *= dc_gain / sum;
  return h;
}

}  // namespace

Waveform resample(const Waveform& w, double target_hz) {
  if (!(target_hz > 0.0)) throw DomainError("resample: target rate must be positive");
  if (!(w.sample_rate_hz > 0.0)) throw DomainError("resample: source rate must be positive");
  if (target_hz == w.sample_rate_hz) return w;
  if (!is_whole(target_hz) || !is_whole(w.sample_rate_hz))
    throw UnsupportedFormatError("resample: non-integer rate ratio");

  const auto in_rate = std::lround(w.sample_rate_hz);
  const auto out_rate = std::lround(target_hz);
  const long g = std::gcd(in_rate, out_rate);
  const long up = out_rate / g;
  const long down = in_rate / g;
  if (up > kMaxInterpolation)
    throw UnsupportedFormatError("resample: ratio " + std::to_string(out_rate) + "/" +
                                 std::to_string(in_rate) + " needs too fine an interpolation grid");

  const double narrow = static_cast<double>(std::min(in_rate, out_rate));
  const double fs_up = static_cast<double>(in_rate) * static_cast<double>(up);
  const auto h = design_lowpass(fs_up, 0.45 * narrow, 0.05 * narrow, static_cast<double>(up));
  const long half = static_cast<long>(h.size() / 2);

  const long n_in = static_cast<long>(w.samples.size());
  const long n_out = std::lround(static_cast<double>(n_in) * static_cast<double>(up) /
                                 static_cast<double>(down));
  Waveform out;
  out.sample_rate_hz = target_hz;
  out.samples.assign(static_cast<std::size_t>(std::max(0L, n_out)), 0.0);

  for (long n = 0; n < n_out; ++n) {
    // Position of output n on the interpolated grid.
    const long centre = n * down;
    // floor/ceil division that behaves for negative numerators.
    long j_lo = (centre - half + up - 1) / up;
    if (centre - half < 0) j_lo = -((half - centre) / up);
    long j_hi = (centre + half) / up;
    j_lo = std::max(j_lo, 0L);
    j_hi = std::min(j_hi, n_in - 1);
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j) acc += w.samples[static_cast<std::size_t>(j)] *
                                              h[static_cast<std::size_t>(half + centre - j * up)];
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

double rms(const Waveform& w, double t0_s, double t1_s) {
  if (!(w.sample_rate_hz > 0.0)) throw DomainError("rms: sample rate must be positive");
  const double duration = w.duration_s();
  // Half a sample of slack so callers can pass the nominal duration.
  const double slack = 0.5 / w.sample_rate_hz;
  if (t0_s < 0.0 || !(t0_s < t1_s) || t1_s > duration + slack)
    throw DomainError("rms: interval must satisfy 0 <= t0 < t1 <= duration");
  const auto n = static_cast<long>(w.samples.size());
  const long i0 = std::clamp(std::lround(t0_s * w.sample_rate_hz), 0L, n);
  const long i1 = std::clamp(std::lround(t1_s * w.sample_rate_hz), 0L, n);
  if (i1 <= i0) throw DomainError("rms: interval holds no samples");
  double acc = 0.0;
  for (long i = i0; i < i1; ++i) acc += w.samples[static_cast<std::size_t>(i)] * w.samples[static_cast<std::size_t>(i)];
  return std::sqrt(acc / static_cast<double>(i1 - i0));
}

}  // namespace crymodal
