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

#include "crymodal/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>

#include <fmt/format.h>

#include "crymodal/errors.hpp"

namespace crymodal {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ParseError(line, fmt::format("'{}' expects a number, got '{}'", key, v));
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError(line, fmt::format("'{}' expects a non-negative integer, got '{}'", key, v));
  return out;
}

bool to_bool(std::string_view key, std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError(line, fmt::format("'{}' expects true or false, got '{}'", key, v));
}

// Shortest text that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }
std::string flag(bool v) { return v ? "true" : "false"; }

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

#define CRY_DOUBLE(NAME, FIELD)                                                           \
  Key {                                                                                   \
    NAME, [](RunConfig& c, std::string_view v, std::size_t l) { c.FIELD = to_double(NAME, v, l); }, \
        [](const RunConfig& c) { return num(c.FIELD); }                                   \
  }
#define CRY_BOOL(NAME, FIELD)                                                             \
  Key {                                                                                   \
    NAME, [](RunConfig& c, std::string_view v, std::size_t l) { c.FIELD = to_bool(NAME, v, l); }, \
        [](const RunConfig& c) { return flag(c.FIELD); }                                  \
  }
#define CRY_SIZE(NAME, FIELD)                                                             \
  Key {                                                                                   \
    NAME,                                                                                 \
        [](RunConfig& c, std::string_view v, std::size_t l) {                             \
          c.FIELD = static_cast<std::size_t>(to_uint(NAME, v, l));                        \
        },                                                                                \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                        \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      {"corpus", [](RunConfig& c, std::string_view v, std::size_t) { c.corpus = std::string(v); },
       [](const RunConfig& c) { return c.corpus.string(); }},
      {"out", [](RunConfig& c, std::string_view v, std::size_t) { c.out = std::string(v); },
       [](const RunConfig& c) { return c.out.string(); }},
      {"seed", [](RunConfig& c, std::string_view v, std::size_t l) { c.seed = to_uint("seed", v, l); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      CRY_SIZE("segments_per_subject", segments_per_subject),
      CRY_DOUBLE("rms_gate", rms_gate),
      CRY_DOUBLE("window_s", window_s),
      CRY_DOUBLE("bias_gate_icc", bias_gate_icc),
      CRY_BOOL("bias_all_measures", bias_all_measures),
      CRY_DOUBLE("outlier_sigmas", outlier_sigmas),
      {"tier", [](RunConfig& c, std::string_view v, std::size_t) { c.tier = std::string(v); },
       [](const RunConfig& c) { return c.tier; }},
      CRY_SIZE("workers", workers),
      {"sampling.unit",
       [](RunConfig& c, std::string_view v, std::size_t l) {
         try {
           c.sampling_unit = parse_sampling_unit(v);
         } catch (const ParseError&) {
           throw ParseError(l, fmt::format("'sampling.unit' expects segments or windows, got '{}'", v));
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.sampling_unit)); }},
      CRY_DOUBLE("max_lag_s", sync.max_lag_s),
      CRY_DOUBLE("sync.band_lo_hz", sync.band_lo_hz),
      CRY_DOUBLE("sync.band_hi_hz", sync.band_hi_hz),
      CRY_DOUBLE("pitch.floor_hz", pitch.floor_hz),
      CRY_DOUBLE("pitch.ceiling_hz", pitch.ceiling_hz),
      CRY_DOUBLE("pitch.time_step_s", pitch.time_step_s),
      CRY_DOUBLE("pitch.voicing_threshold", pitch.voicing_threshold),
      CRY_DOUBLE("pitch.octave_cost", pitch.octave_cost),
      CRY_BOOL("jitter.smoothing", cycles.smooth_periods),
      CRY_BOOL("shimmer.iqr_filter", cycles.filter_amplitudes),
      CRY_DOUBLE("iqr.fence", cycles.iqr_fence),
  };
  return table;
}

#undef CRY_DOUBLE
#undef CRY_BOOL
#undef CRY_SIZE

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(cfg, trim(value), line);
      return;
    }
  }
  throw ParseError(line, fmt::format("unknown configuration key '{}'", key));
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, fmt::format("expected 'key = value', got '{}'", line));
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");
    if (!seen.insert(std::string(key)).second)
      throw ParseError(line_no, fmt::format("key '{}' given twice", key));
    apply_setting(cfg, key, line.substr(eq + 1), line_no);
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  apply_config_text(cfg, text);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.segments_per_subject == 0) throw DomainError("segments_per_subject must be positive");
  if (!(cfg.rms_gate >= 0.0)) throw DomainError("rms_gate must be non-negative");
  if (!(cfg.window_s > 0.0)) throw DomainError("window_s must be positive");
  if (!(cfg.bias_gate_icc >= -1.0 && cfg.bias_gate_icc <= 1.0)) throw DomainError("bias_gate_icc must lie in [-1, 1]");
  if (!(cfg.outlier_sigmas > 0.0)) throw DomainError("outlier_sigmas must be positive");
  if (cfg.workers == 0) throw DomainError("workers must be positive");
  if (!(cfg.sync.max_lag_s >= 0.0)) throw DomainError("max_lag_s must be non-negative");
  if (!(cfg.sync.band_lo_hz > 0.0 && cfg.sync.band_lo_hz < cfg.sync.band_hi_hz))
    throw DomainError("sync band must satisfy 0 < lo < hi");
  if (!(cfg.cycles.iqr_fence > 0.0)) throw DomainError("iqr.fence must be positive");
  validate(cfg.pitch, 11025.0);
}

}  // namespace crymodal
