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

#include <filesystem>
#include <optional>
#include <string>

#include "crymodal/waveform.hpp"

namespace crymodal {

inline constexpr double kAnalysisRateHz = 11025.0;

// Reads both channels, brings them to the analysis rate and attaches the
// segments of the chosen interval tier (first interval tier when `tier` is
// empty). Channels are not synchronized here.
RecordingPair load_recording_pair(const std::filesystem::path& mic_path,
                                  const std::filesystem::path& acc_path,
                                  const std::filesystem::path& annotation_path,
                                  std::string subject_id, AgeGroup age_group,
                                  const std::optional<std::string>& tier = std::nullopt);

}  // namespace crymodal
