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

struct SyncResult {
  // Positive when the ACC channel lags the MIC channel: acc[n] ~ mic[n - lag].
  long lag_samples = 0;
  double peak_correlation = 0.0;
};

struct SyncParams {
  double max_lag_s = 2.0;
  // Pass band emphasised before correlating. Edges roll off with a
  // raised-cosine taper outside [band_lo_hz, band_hi_hz].
  double band_lo_hz = 200.0;
  double band_hi_hz = 1500.0;
};

// Integer lag maximizing the normalized cross-correlation of the band-passed,
// mean-removed channels over [-max_lag, +max_lag].
//
// Throws DomainError on mismatched rates or when either signal is not longer
// than the maximum lag, DegenerateError when either carries no energy.
SyncResult estimate_lag(const Waveform& mic, const Waveform& acc, const SyncParams& params = {});

// Shifts the lagging channel so both start together and truncates both to
// their common length. For positive lags ACC loses its first samples. For
// negative lags MIC loses them, so segment times are shifted back by the
// same amount and clipped; segments falling outside are dropped.
RecordingPair apply_lag(RecordingPair pair, const SyncResult& sync);

}  // namespace crymodal
