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

#include "crymodal/waveform.hpp"

namespace crymodal {

// Rational-ratio polyphase resampler. The anti-aliasing filter is a
// Kaiser-windowed sinc with cutoff 0.45 * min(source, target) and at least
// 60 dB of stopband rejection from min(source, target) / 2 upwards; the
// filter is centred so the output carries no group delay.
//
// Both rates must be whole numbers of Hz, and the reduced upsampling factor
// must not exceed kMaxInterpolation; other ratios raise
// UnsupportedFormatError. Output length is round(n * target / source).
Waveform resample(const Waveform& w, double target_hz);

inline constexpr long kMaxInterpolation = 2048;

// Root-mean-square amplitude over [t0, t1). Sample i belongs to the interval
// when round(t0 * fs) <= i < round(t1 * fs).
double rms(const Waveform& w, double t0_s, double t1_s);

}  // namespace crymodal
