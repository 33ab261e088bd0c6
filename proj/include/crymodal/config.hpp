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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crymodal/agreement.hpp"
#include "crymodal/alignment.hpp"
#include "crymodal/measures.hpp"
#include "crymodal/pitch.hpp"

namespace crymodal {

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  std::size_t segments_per_subject = 20;
  double rms_gate = 0.01;
  double window_s = 0.050;
  double bias_gate_icc = 0.75;
  bool bias_all_measures = false;
  double outlier_sigmas = 3.0;
  // Annotation tier name; empty selects the first interval tier.
  std::string tier;
  std::size_t workers = 1;
  SamplingUnit sampling_unit = SamplingUnit::kSegments;
  SyncParams sync;
  PitchParams pitch;
  CycleOptions cycles;
};

// Flat "key = value" lines; '#' starts a comment. Throws ParseError with
// the line number for malformed lines, unknown keys, bad values and
// repeated keys.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Sets one key. Throws ParseError(line, ...) for unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value,
                   std::size_t line = 0);

// Every key with the value in effect, in a fixed order. Feeding the result
// back through apply_setting reproduces the configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

// Throws DomainError naming the first out-of-range field.
void validate(const RunConfig& cfg);

}  // namespace crymodal
