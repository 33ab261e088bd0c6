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
#include <span>
#include <string>

#include "crymodal/agreement.hpp"

namespace crymodal {

// Numbers use up to nine significant digits; absent values are empty cells.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

std::string window_measures_csv(std::span<const WindowRow> rows);
std::string icc_report_csv(std::span<const IccResult> rows);
std::string bias_report_csv(std::span<const BiasResult> rows);
std::string histogram_2d_csv(std::span<const Histogram2dCell> cells);
std::string histogram_diff_csv(std::span<const HistogramDiffBin> bins);

// Writes through a temporary file in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace crymodal
