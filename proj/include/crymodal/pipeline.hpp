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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crymodal/alignment.hpp"
#include "crymodal/config.hpp"
#include "crymodal/measures.hpp"

namespace crymodal {

struct SubjectEntry {
  std::string subject_id;
  std::filesystem::path dir;
};

// Every sub-directory of root, in name order. Throws IoError when root is
// not a directory.
std::vector<SubjectEntry> discover_corpus(const std::filesystem::path& root);

struct SubjectResult {
  std::string subject_id;
  std::optional<AgeGroup> age_group;
  bool ok = false;
  std::string error;
  SyncResult sync;
  std::size_t segments = 0;
  std::vector<AnalysisWindow> windows;
  // Two rows (mic, acc) per window, in window order.
  std::vector<WindowRow> rows;
};

// Load, synchronize, window and measure one subject. Failures are reported
// in the result rather than thrown.
SubjectResult process_subject(const SubjectEntry& entry, const RunConfig& cfg);

// Runs process_subject over all entries on cfg.workers threads; results
// keep the entry order.
std::vector<SubjectResult> process_corpus(const std::vector<SubjectEntry>& entries, const RunConfig& cfg);

inline constexpr std::size_t kMinSubjects = 3;

// Full analysis. Returns the process exit status: 0 on success, 1 when the
// corpus cannot be analyzed (fewer than three usable subjects, i/o errors).
int run_analyze(const RunConfig& cfg, std::ostream& log);

// Compares measurements against each subject's truth.json and prints one
// line per check. Returns 0 only if every check passes.
int run_validate(const RunConfig& cfg, std::ostream& out);

}  // namespace crymodal
