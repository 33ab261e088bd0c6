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

#include "crymodal/recording.hpp"

#include <algorithm>

#include "crymodal/errors.hpp"
#include "crymodal/signal_ops.hpp"
#include "crymodal/textgrid.hpp"
#include "crymodal/wav_io.hpp"

namespace crymodal {

RecordingPair load_recording_pair(const std::filesystem::path& mic_path,
                                  const std::filesystem::path& acc_path,
                                  const std::filesystem::path& annotation_path,
                                  std::string subject_id, AgeGroup age_group,
                                  const std::optional<std::string>& tier) {
  auto tiers = read_textgrid(annotation_path);
  RecordingPair pair;
  pair.subject_id = std::move(subject_id);
  pair.age_group = age_group;
  pair.mic = resample(read_wav(mic_path), kAnalysisRateHz);
  pair.acc = resample(read_wav(acc_path), kAnalysisRateHz);
  validate(pair.mic);
  validate(pair.acc);

  if (tiers.empty()) throw ParseError(0, annotation_path.string() + ": no interval tier");
  auto chosen = tiers.begin();
  if (tier && !tier->empty()) {
    chosen = std::find_if(tiers.begin(), tiers.end(),
                          [&](const IntervalTier& t) { return t.name == *tier; });
    if (chosen == tiers.end())
      throw ParseError(0, annotation_path.string() + ": no interval tier named '" + *tier + "'");
  }
  pair.segments = std::move(chosen->intervals);
  return pair;
}

}  // namespace crymodal
