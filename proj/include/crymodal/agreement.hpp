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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crymodal/measures.hpp"

namespace crymodal {

enum class IccClass { kPoor, kModerate, kGood, kExcellent };

// Below 0.50 poor, below 0.75 moderate, up to 0.90 good, above excellent.
IccClass classify_icc(double icc);
std::string_view to_string(IccClass c);

struct IccValues {
  double a1 = 0.0;  // absolute agreement, single rater
  double c1 = 0.0;  // consistency, single rater
};

// Two-way ANOVA ICCs for n subjects rated by two modalities.
// Throws InsufficientDataError for n < 3 and DegenerateError when the
// coefficients are undefined (no variance).
IccValues icc(std::span<const double> mic, std::span<const double> acc);

struct PairedT {
  double bias = 0.0;  // mean of acc - mic
  double t = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  // Set when the differences have zero spread, so t is 0 or infinite.
  bool degenerate = false;
};

// Throws InsufficientDataError for n < 2.
PairedT paired_t(std::span<const double> mic, std::span<const double> acc);

// For each measure and modality, values farther than three sample standard
// deviations from the pooled mean become absent.
std::vector<WindowRow> exclude_outliers(std::vector<WindowRow> rows, double sigmas = 3.0);

enum class SamplingUnit { kSegments, kWindows };

std::string_view to_string(SamplingUnit u);
SamplingUnit parse_sampling_unit(std::string_view text);

// Keeps at most k units (segments, or individual windows) per subject, drawn
// uniformly without replacement. The draw for a subject depends only on the
// seed and the subject id.
std::vector<WindowRow> sample_segments(std::vector<WindowRow> rows, std::size_t k,
                                       std::uint64_t seed,
                                       SamplingUnit unit = SamplingUnit::kSegments);

struct SubjectSummary {
  std::string subject_id;
  AgeGroup age_group = AgeGroup::kM4;
  // (mic mean, acc mean) over windows where both modalities have the measure.
  std::array<std::optional<std::pair<double, double>>, kMeasureCount> means{};
  std::array<std::size_t, kMeasureCount> windows_used{};
  std::size_t n_segments_used = 0;
};

// Subjects in ascending id order.
std::vector<SubjectSummary> summarize_subjects(std::span<const WindowRow> rows);

struct OctaveErrors {
  double halving = 0.0;
  double doubling = 0.0;
  std::size_t pairs = 0;
};

// Fractions of windows with both F0 values present whose acc/mic ratio lies
// within 5 % of 0.5 or of 2.0. Absent when no such window exists.
std::optional<OctaveErrors> octave_error_rate(std::span<const WindowRow> rows);

struct IccResult {
  Measure measure = Measure::kF0;
  std::string scope;  // "overall", "m4" or "m12"
  IccValues values;
  IccClass class_a1 = IccClass::kPoor;
  IccClass class_c1 = IccClass::kPoor;
  std::size_t n = 0;
};

struct BiasResult {
  Measure measure = Measure::kF0;
  AgeGroup age = AgeGroup::kM4;
  PairedT stats;
};

struct ReportOptions {
  double bias_gate_icc = 0.75;
  bool bias_all_measures = false;
};

struct Reports {
  std::vector<IccResult> icc;
  std::vector<BiasResult> bias;
  std::vector<std::string> warnings;
};

// ICC per measure for all subjects and per age group, and bias tests per age
// group for measures whose overall ICC(A,1) falls below the gate. Scopes
// without subjects are skipped silently; scopes where a statistic is
// undefined are skipped with a warning.
Reports build_reports(std::span<const SubjectSummary> summaries, const ReportOptions& opts);

struct Histogram2dCell {
  Measure measure = Measure::kF0;
  double mic_lo = 0.0, mic_hi = 0.0, acc_lo = 0.0, acc_hi = 0.0;
  std::size_t count = 0;
};

struct HistogramDiffBin {
  Measure measure = Measure::kF0;
  AgeGroup age = AgeGroup::kM4;
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
};

// Joint (mic, acc) histogram over paired windows on a shared square range,
// and acc - mic histograms per age group.
std::vector<Histogram2dCell> histogram_2d(std::span<const WindowRow> rows, std::size_t bins = 20);
std::vector<HistogramDiffBin> histogram_diff(std::span<const WindowRow> rows, std::size_t bins = 20);

// Rows for the same (subject, segment, window) in both modalities, ordered
// by subject, segment, window.
std::vector<std::pair<const WindowRow*, const WindowRow*>> pair_rows(std::span<const WindowRow> rows);

}  // namespace crymodal
