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

#include <cstddef>
#include <optional>
#include <vector>

#include "crymodal/waveform.hpp"

namespace crymodal {

struct PitchParams {
  double time_step_s = 0.001;
  double floor_hz = 200.0;
  double ceiling_hz = 1500.0;
  double voicing_threshold = 0.45;
  // Per-frame preference for shorter lags: a candidate's score is its
  // correlation minus octave_cost * log2(ceiling / f0).
  double octave_cost = 0.1;
};

// Throws DomainError unless 0 < floor < ceiling < fs/2, step > 0 and the
// threshold lies in (0, 1).
void validate(const PitchParams& p, double sample_rate_hz);

// Frames sit on the global grid t = i * time_step_s, for every i whose
// analysis span fits inside the signal.
struct PitchTrack {
  std::vector<double> frame_times_s;
  std::vector<std::optional<double>> f0_hz;
  // Normalized correlation of the chosen candidate, in [0, 1).
  std::vector<double> strength;
  double time_step_s = 0.0;

  std::size_t size() const noexcept { return frame_times_s.size(); }
  // Index of the frame closest to t, or nullopt when t is off the track.
  std::optional<std::size_t> frame_at(double t_s) const;
};

// Per-frame periodicity analysis. The analysis span of a frame is 2 / floor_hz
// long and centred on the frame: its first half is correlated against copies
// lagged by 1/ceiling .. 1/floor. Positive local maxima are candidates; the
// best candidate's lag is refined to sub-sample precision by band-limited
// interpolation, and the frame is voiced when its correlation reaches the
// voicing threshold.
//
// Throws DomainError when the signal is shorter than one analysis span.
PitchTrack track_pitch(const Waveform& w, const PitchParams& p);

// Correlation of the best candidate for a frame centred at t, clamped to
// [0, 1). Throws DomainError when the analysis span does not fit.
double harmonic_strength(const Waveform& w, double t_s, const PitchParams& p);

struct PointProcess {
  std::vector<double> instants_s;
  // Voiced-run index of each instant. Periods are only formed between
  // instants sharing a run.
  std::vector<std::size_t> run;

  std::size_t size() const noexcept { return instants_s.size(); }
};

// One waveform extremum per glottal cycle inside each voiced run. The run's
// dominant polarity is used; the walk starts at the run's strongest extremum
// and proceeds both ways, looking for the next extremum within
// [0.75, 1.25] local periods of the previous one.
PointProcess extract_point_process(const Waveform& w, const PitchTrack& track,
                                   const PitchParams& p);

}  // namespace crymodal
