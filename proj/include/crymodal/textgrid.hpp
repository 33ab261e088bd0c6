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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crymodal/waveform.hpp"

namespace crymodal {

struct IntervalTier {
  std::string name;
  std::vector<LabeledSegment> intervals;
};

// Parses Praat's long ("ooTextFile") TextGrid text, already decoded to UTF-8.
// Point tiers are skipped. Interval text "cry", "cry+noise" and "" maps to
// kCryOnly, kCryNoise and kNonCry; anything else is kept as kNonCry with
// unknown_label set. Zero-length intervals are dropped.
//
// Throws ParseError carrying the 1-based line of the offending token.
std::vector<IntervalTier> parse_textgrid(std::string_view text);

// Byte-level entry point: strips a UTF-8 BOM, or decodes UTF-16 (LE or BE)
// when a UTF-16 BOM is present.
std::vector<IntervalTier> parse_textgrid(std::span<const std::uint8_t> bytes);

std::vector<IntervalTier> read_textgrid(const std::filesystem::path& path);

// Long-format writer. Intervals are written as given; gaps are not filled.
// Numbers are written with 17 significant digits.
std::string serialize_textgrid(std::span<const IntervalTier> tiers, double xmin, double xmax);

void write_textgrid(const std::filesystem::path& path, std::span<const IntervalTier> tiers,
                    double xmin, double xmax);

std::string_view label_text(const LabeledSegment& segment);

}  // namespace crymodal
