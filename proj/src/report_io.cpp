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

#include "crymodal/report_io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "crymodal/errors.hpp"

namespace crymodal {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.9g}", v);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string window_measures_csv(std::span<const WindowRow> rows) {
  std::string out = "subject_id,age_group,segment,window,modality";
  for (Measure m : kAllMeasures) out += fmt::format(",{}", to_string(m));
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}", r.subject_id, to_string(r.age_group), r.segment, r.window,
                       to_string(r.modality));
    for (Measure m : kAllMeasures) out += "," + format_number(r.measures[m]);
    out += '\n';
  }
  return out;
}

std::string icc_report_csv(std::span<const IccResult> rows) {
  std::string out = "measure,scope,icc_a1,icc_c1,classification_a1,classification_c1,n_subjects\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(r.measure), r.scope, format_number(r.values.a1),
                       format_number(r.values.c1), to_string(r.class_a1), to_string(r.class_c1), r.n);
  return out;
}

std::string bias_report_csv(std::span<const BiasResult> rows) {
  std::string out = "measure,age_group,bias,t_stat,p_value,n,degenerate\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(r.measure), to_string(r.age), format_number(r.stats.bias),
                       format_number(r.stats.t), format_number(r.stats.p), r.stats.n, r.stats.degenerate);
  return out;
}

std::string histogram_2d_csv(std::span<const Histogram2dCell> cells) {
  std::string out = "measure,mic_lo,mic_hi,acc_lo,acc_hi,count\n";
  for (const auto& c : cells)
    out += fmt::format("{},{},{},{},{},{}\n", to_string(c.measure), format_number(c.mic_lo), format_number(c.mic_hi),
                       format_number(c.acc_lo), format_number(c.acc_hi), c.count);
  return out;
}

std::string histogram_diff_csv(std::span<const HistogramDiffBin> bins) {
  std::string out = "measure,age_group,diff_lo,diff_hi,count\n";
  for (const auto& b : bins)
    out += fmt::format("{},{},{},{},{}\n", to_string(b.measure), to_string(b.age), format_number(b.lo),
                       format_number(b.hi), b.count);
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace crymodal
