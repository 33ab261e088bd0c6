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

#include "crymodal/waveform.hpp"

#include <cmath>

#include "crymodal/errors.hpp"

namespace crymodal {

void validate(const Waveform& w) {
  if (!(w.sample_rate_hz > 0.0) || !std::isfinite(w.sample_rate_hz))
    throw DomainError("waveform sample rate must be positive");
  for (double s : w.samples)
    if (!std::isfinite(s)) throw DomainError("waveform contains a non-finite sample");
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kCryOnly: return "cry_only";
    case Label::kCryNoise: return "cry_noise";
    case Label::kNonCry: return "non_cry";
  }
  return "non_cry";
}

std::string_view to_string(AgeGroup age) {
  return age == AgeGroup::kM4 ? "m4" : "m12";
}

AgeGroup parse_age_group(std::string_view text) {
  if (text == "m4" || text == "4m") return AgeGroup::kM4;
  if (text == "m12" || text == "12m") return AgeGroup::kM12;
  throw ParseError(0, "unknown age group '" + std::string(text) + "'");
}

std::string_view to_string(Modality m) { return m == Modality::kMic ? "mic" : "acc"; }

}  // namespace crymodal
