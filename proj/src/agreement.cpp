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

#include "crymodal/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "crymodal/dsp.hpp"
#include "crymodal/errors.hpp"
#include "crymodal/special_functions.hpp"

namespace crymodal {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Unbiased draw from [0, n). std::uniform_int_distribution is not specified
// bit-for-bit, so sampling would differ between standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

struct Range {
  double lo, hi;
};

Range span_of(std::span<const double> v) {
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  Range r{*mn, *mx};
  if (!(r.hi > r.lo)) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

std::size_t bin_of(double v, const Range& r, std::size_t bins) {
  const double width = (r.hi - r.lo) / static_cast<double>(bins);
  const auto i = static_cast<long>(std::floor((v - r.lo) / width));
  return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(bins) - 1));
}

}  // namespace

IccClass classify_icc(double icc) {
  if (icc < 0.5) return IccClass::kPoor;
  if (icc < 0.75) return IccClass::kModerate;
  if (icc <= 0.9) return IccClass::kGood;
  return IccClass::kExcellent;
}

std::string_view to_string(IccClass c) {
  switch (c) {
    case IccClass::kPoor: return "poor";
    case IccClass::kModerate: return "moderate";
    case IccClass::kGood: return "good";
    case IccClass::kExcellent: return "excellent";
  }
  return "?";
}

IccValues icc(std::span<const double> mic, std::span<const double> acc) {
  if (mic.size() != acc.size()) throw DomainError("icc: columns differ in length");
  const std::size_t n = mic.size();
  if (n < 3) throw InsufficientDataError(fmt::format("icc: needs at least 3 subjects, got {}", n));
  const double k = 2.0;
  const double nd = static_cast<double>(n);

  const double mean_mic = dsp::mean(mic);
  const double mean_acc = dsp::mean(acc);
  const double grand = 0.5 * (mean_mic + mean_acc);
  double ss_rows = 0.0, ss_err = 0.0, ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(mic[i]) || !std::isfinite(acc[i])) throw DomainError("icc: non-finite value");
    const double row = 0.5 * (mic[i] + acc[i]);
    ss_rows += k * (row - grand) * (row - grand);
    const double e_mic = mic[i] - row - mean_mic + grand;
    const double e_acc = acc[i] - row - mean_acc + grand;
    ss_err += e_mic * e_mic + e_acc * e_acc;
    ss_total += (mic[i] - grand) * (mic[i] - grand) + (acc[i] - grand) * (acc[i] - grand);
  }
  const double ss_cols = nd * ((mean_mic - grand) * (mean_mic - grand) + (mean_acc - grand) * (mean_acc - grand));
  if (!(ss_total > 0.0)) throw DegenerateError("icc: no variance");

  const double ms_rows = ss_rows / (nd - 1.0);
  const double ms_cols = ss_cols / (k - 1.0);
  const double ms_err = ss_err / ((nd - 1.0) * (k - 1.0));
  const double den_c = ms_rows + (k - 1.0) * ms_err;
  const double den_a = den_c + (k / nd) * (ms_cols - ms_err);
  if (!(den_c > 0.0) || !(den_a > 0.0)) throw DegenerateError("icc: undefined without between-subject variance");
  return {(ms_rows - ms_err) / den_a, (ms_rows - ms_err) / den_c};
}

PairedT paired_t(std::span<const double> mic, std::span<const double> acc) {
  if (mic.size() != acc.size()) throw DomainError("paired_t: columns differ in length");
  if (mic.size() < 2) throw InsufficientDataError("paired_t: needs at least 2 pairs");
  std::vector<double> d(mic.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = acc[i] - mic[i];
  PairedT r;
  r.n = d.size();
  r.bias = dsp::mean(d);
  const double sd = dsp::sample_std(d);
  if (!(sd > 0.0)) {
    r.degenerate = true;
    if (r.bias == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.bias);
      r.p = 0.0;
    }
    return r;
  }
  r.t = r.bias / (sd / std::sqrt(static_cast<double>(r.n)));
  r.p = special::student_t_two_sided(r.t, static_cast<double>(r.n - 1));
  return r;
}

std::vector<WindowRow> exclude_outliers(std::vector<WindowRow> rows, double sigmas) {
  for (Measure m : kAllMeasures) {
    for (Modality mod : {Modality::kMic, Modality::kAcc}) {
      std::vector<double> values;
      for (const auto& row : rows)
        if (row.modality == mod && row.measures[m]) values.push_back(*row.measures[m]);
      if (values.size() < 2) continue;
      const double mean = dsp::mean(values);
      const double sd = dsp::sample_std(values);
      if (!(sd > 0.0)) continue;
      for (auto& row : rows) {
        auto& v = row.measures[m];
        if (row.modality == mod && v && std::abs(*v - mean) > sigmas * sd) v.reset();
      }
    }
  }
  return rows;
}

std::string_view to_string(SamplingUnit u) {
  return u == SamplingUnit::kSegments ? "segments" : "windows";
}

SamplingUnit parse_sampling_unit(std::string_view text) {
  if (text == "segments") return SamplingUnit::kSegments;
  if (text == "windows") return SamplingUnit::kWindows;
  throw ParseError(0, fmt::format("unknown sampling unit '{}'", text));
}

std::vector<WindowRow> sample_segments(std::vector<WindowRow> rows, std::size_t k,
                                       std::uint64_t seed, SamplingUnit unit) {
  if (k == 0) throw DomainError("sample_segments: k must be positive");
  using Key = std::pair<std::size_t, std::size_t>;
  auto key_of = [unit](const WindowRow& r) {
    return unit == SamplingUnit::kSegments ? Key{r.segment, 0} : Key{r.segment, r.window};
  };
  std::map<std::string, std::set<Key>> units;
  for (const auto& r : rows) units[r.subject_id].insert(key_of(r));

  std::map<std::string, std::set<Key>> kept;
  for (const auto& [subject, keys] : units) {
    std::vector<Key> pool(keys.begin(), keys.end());
    if (pool.size() > k) {
      std::mt19937_64 rng(seed ^ fnv1a(subject));
      for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(k);
    }
    kept[subject] = std::set<Key>(pool.begin(), pool.end());
  }
  std::erase_if(rows, [&](const WindowRow& r) { return !kept[r.subject_id].contains(key_of(r)); });
  return rows;
}

std::vector<std::pair<const WindowRow*, const WindowRow*>> pair_rows(std::span<const WindowRow> rows) {
  std::map<std::tuple<std::string, std::size_t, std::size_t>,
           std::pair<const WindowRow*, const WindowRow*>>
      table;
  for (const auto& r : rows) {
    auto& slot = table[{r.subject_id, r.segment, r.window}];
    (r.modality == Modality::kMic ? slot.first : slot.second) = &r;
  }
  std::vector<std::pair<const WindowRow*, const WindowRow*>> out;
  for (const auto& [key, slot] : table)
    if (slot.first && slot.second) out.push_back(slot);
  return out;
}

std::vector<SubjectSummary> summarize_subjects(std::span<const WindowRow> rows) {
  struct Acc {
    SubjectSummary summary;
    std::array<double, kMeasureCount> mic{}, acc{};
    std::set<std::size_t> segments;
  };
  std::map<std::string, Acc> subjects;
  for (const auto& r : rows) {
    auto& a = subjects[r.subject_id];
    a.summary.subject_id = r.subject_id;
    a.summary.age_group = r.age_group;
  }
  for (const auto& [mic, acc] : pair_rows(rows)) {
    auto& a = subjects[mic->subject_id];
    bool any = false;
    for (Measure m : kAllMeasures) {
      const auto& vm = mic->measures[m];
      const auto& va = acc->measures[m];
      if (!vm || !va) continue;
      const auto i = static_cast<std::size_t>(m);
      a.mic[i] += *vm;
      a.acc[i] += *va;
      ++a.summary.windows_used[i];
      any = true;
    }
    if (any) a.segments.insert(mic->segment);
  }
  std::vector<SubjectSummary> out;
  for (auto& [id, a] : subjects) {
    for (std::size_t i = 0; i < kMeasureCount; ++i) {
      const auto n = static_cast<double>(a.summary.windows_used[i]);
      if (n > 0) a.summary.means[i] = std::pair{a.mic[i] / n, a.acc[i] / n};
    }
    a.summary.n_segments_used = a.segments.size();
    out.push_back(std::move(a.summary));
  }
  return out;
}

std::optional<OctaveErrors> octave_error_rate(std::span<const WindowRow> rows) {
  OctaveErrors e;
  std::size_t halving = 0, doubling = 0;
  for (const auto& [mic, acc] : pair_rows(rows)) {
    const auto& fm = mic->measures[Measure::kF0];
    const auto& fa = acc->measures[Measure::kF0];
    if (!fm || !fa || !(*fm > 0.0)) continue;
    const double ratio = *fa / *fm;
    ++e.pairs;
    if (std::abs(ratio - 0.5) <= 0.05 * 0.5 + 1e-12) ++halving;
    if (std::abs(ratio - 2.0) <= 0.05 * 2.0 + 1e-12) ++doubling;
  }
  if (e.pairs == 0) return std::nullopt;
  e.halving = static_cast<double>(halving) / static_cast<double>(e.pairs);
  e.doubling = static_cast<double>(doubling) / static_cast<double>(e.pairs);
  return e;
}

Reports build_reports(std::span<const SubjectSummary> summaries, const ReportOptions& opts) {
  if (summaries.empty()) throw InsufficientDataError("build_reports: no subjects");
  Reports out;
  auto columns = [&](Measure m, std::optional<AgeGroup> age) {
    std::pair<std::vector<double>, std::vector<double>> cols;
    for (const auto& s : summaries) {
      if (age && s.age_group != *age) continue;
      const auto& v = s.means[static_cast<std::size_t>(m)];
      if (!v) continue;
      cols.first.push_back(v->first);
      cols.second.push_back(v->second);
    }
    return cols;
  };
  const std::array<std::pair<std::string_view, std::optional<AgeGroup>>, 3> scopes{
      {{"overall", std::nullopt}, {"m4", AgeGroup::kM4}, {"m12", AgeGroup::kM12}}};

  for (Measure m : kAllMeasures) {
    std::optional<double> overall_a1;
    for (const auto& [name, age] : scopes) {
      const auto [mic, acc] = columns(m, age);
      if (mic.empty()) continue;
      try {
        const auto v = icc(mic, acc);
        out.icc.push_back({m, std::string(name), v, classify_icc(v.a1), classify_icc(v.c1), mic.size()});
        if (!age) overall_a1 = v.a1;
      } catch (const Error& e) {
        out.warnings.push_back(fmt::format("icc {} {}: {}", to_string(m), name, e.what()));
      }
    }
    const bool gated = opts.bias_all_measures || (overall_a1 && *overall_a1 < opts.bias_gate_icc);
    if (!gated) continue;
    for (AgeGroup age : {AgeGroup::kM4, AgeGroup::kM12}) {
      const auto [mic, acc] = columns(m, age);
      if (mic.empty()) continue;
      try {
        out.bias.push_back({m, age, paired_t(mic, acc)});
      } catch (const Error& e) {
        out.warnings.push_back(fmt::format("bias {} {}: {}", to_string(m), to_string(age), e.what()));
      }
    }
  }
  return out;
}

std::vector<Histogram2dCell> histogram_2d(std::span<const WindowRow> rows, std::size_t bins) {
  std::vector<Histogram2dCell> out;
  const auto pairs = pair_rows(rows);
  for (Measure m : kAllMeasures) {
    std::vector<double> xs, ys, all;
    for (const auto& [mic, acc] : pairs) {
      if (!mic->measures[m] || !acc->measures[m]) continue;
      xs.push_back(*mic->measures[m]);
      ys.push_back(*acc->measures[m]);
    }
    if (xs.empty()) continue;
    all = xs;
    all.insert(all.end(), ys.begin(), ys.end());
    const Range r = span_of(all);
    std::vector<std::size_t> counts(bins * bins, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) ++counts[bin_of(xs[i], r, bins) * bins + bin_of(ys[i], r, bins)];
    const double width = (r.hi - r.lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i)
      for (std::size_t j = 0; j < bins; ++j)
        out.push_back({m, r.lo + width * static_cast<double>(i), r.lo + width * static_cast<double>(i + 1),
                       r.lo + width * static_cast<double>(j), r.lo + width * static_cast<double>(j + 1),
                       counts[i * bins + j]});
  }
  return out;
}

std::vector<HistogramDiffBin> histogram_diff(std::span<const WindowRow> rows, std::size_t bins) {
  std::vector<HistogramDiffBin> out;
  const auto pairs = pair_rows(rows);
  for (Measure m : kAllMeasures) {
    for (AgeGroup age : {AgeGroup::kM4, AgeGroup::kM12}) {
      std::vector<double> d;
      for (const auto& [mic, acc] : pairs)
        if (mic->age_group == age && mic->measures[m] && acc->measures[m])
          d.push_back(*acc->measures[m] - *mic->measures[m]);
      if (d.empty()) continue;
      const Range r = span_of(d);
      std::vector<std::size_t> counts(bins, 0);
      for (double v : d) ++counts[bin_of(v, r, bins)];
      const double width = (r.hi - r.lo) / static_cast<double>(bins);
      for (std::size_t i = 0; i < bins; ++i)
        out.push_back({m, age, r.lo + width * static_cast<double>(i),
                       r.lo + width * static_cast<double>(i + 1), counts[i]});
    }
  }
  return out;
}

}  // namespace crymodal
