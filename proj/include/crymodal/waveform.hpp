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
#include <string>
#include <string_view>
#include <vector>

namespace crymodal {

/// Uniformly sampled mono signal. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Throws DomainError when the rate is non-positive or a sample is non-finite.
void validate(const Waveform& w);

enum class Label { kCryOnly, kCryNoise, kNonCry };

std::string_view to_string(Label label);

struct LabeledSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  Label label = Label::kNonCry;
  // Raw interval text when it did not map onto a known label. Such segments
  // are carried as kNonCry and never analyzed.
  bool unknown_label = false;
  std::string text;

  double duration_s() const noexcept { return end_s - start_s; }
};

enum class AgeGroup { kM4, kM12 };

std::string_view to_string(AgeGroup age);
// Accepts "m4"/"m12" (also "4m"/"12m"); throws ParseError(0, ...) otherwise.
AgeGroup parse_age_group(std::string_view text);

enum class Modality { kMic, kAcc };

std::string_view to_string(Modality m);

struct RecordingPair {
  std::string subject_id;
  AgeGroup age_group = AgeGroup::kM4;
  Waveform mic;
  Waveform acc;
  std::vector<LabeledSegment> segments;
};

}  // namespace crymodal
