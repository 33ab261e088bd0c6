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

#include "crymodal/textgrid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "crymodal/errors.hpp"

namespace crymodal {
namespace {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_utf16(std::span<const std::uint8_t> bytes, bool big_endian) {
  std::string out;
  out.reserve(bytes.size() / 2);
  std::size_t i = 0;
  auto unit = [&](std::size_t at) -> char16_t {
    return big_endian ? static_cast<char16_t>((bytes[at] << 8) | bytes[at + 1])
                      : static_cast<char16_t>((bytes[at + 1] << 8) | bytes[at]);
  };
  while (i + 1 < bytes.size()) {
    char32_t cp = unit(i);
    i += 2;
    if (cp >= 0xD800 && cp < 0xDC00) {
      if (i + 1 >= bytes.size()) throw ParseError(0, "truncated UTF-16 surrogate pair");
      const char32_t lo = unit(i);
      if (lo < 0xDC00 || lo >= 0xE000) throw ParseError(0, "invalid UTF-16 surrogate pair");
      i += 2;
      cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
    } else if (cp >= 0xDC00 && cp < 0xE000) {
      throw ParseError(0, "unpaired UTF-16 low surrogate");
    }
    append_utf8(out, cp);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back({number++, text.substr(pos, end - pos)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

double parse_number(std::string_view raw, std::size_t line, std::string_view key) {
  const auto s = trim(raw);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr))).size() != 0 ||
      !std::isfinite(v))
    throw ParseError(line, fmt::format("expected a number for '{}', got '{}'", key, s));
  return v;
}

Label map_label(std::string_view text, bool& unknown) {
  unknown = false;
  if (text == "cry") return Label::kCryOnly;
  if (text == "cry+noise") return Label::kCryNoise;
  if (text.empty()) return Label::kNonCry;
  unknown = true;
  return Label::kNonCry;
}

// Line-oriented reader over "key = value" pairs. Quoted values may span
// lines and use "" for a literal quote.
class Reader {
 public:
  explicit Reader(std::string_view text) : lines_(split_lines(text)) {}

  std::vector<IntervalTier> run() {
    if (lines_.empty() || trim(lines_[0].text).find("ooTextFile") == std::string_view::npos)
      throw ParseError(1, "not a TextGrid text file (missing ooTextFile header)");
    bool saw_class = false;
    for (idx_ = 1; idx_ < lines_.size(); ++idx_) {
      const auto& line = lines_[idx_];
      const auto t = trim(line.text);
      if (t.empty()) continue;
      if (t.starts_with("Object class")) {
        if (read_string(t, line.number).find("TextGrid") == std::string::npos)
          throw ParseError(line.number, "object class is not TextGrid");
        saw_class = true;
        continue;
      }
      if (t.starts_with("item [") || t.starts_with("item[")) {
        finish_interval();
        finish_tier();
        continue;
      }
      if (t.starts_with("intervals [") || t.starts_with("intervals[")) {
        finish_interval();
        if (!tier_) throw ParseError(line.number, "interval outside an interval tier");
        interval_ = PendingInterval{line.number, std::string(t.substr(0, t.find(':'))), std::nullopt, std::nullopt};
        continue;
      }
      if (t.starts_with("points [") || t.starts_with("points[")) continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(t.substr(0, eq));
      const auto value = t.substr(eq + 1);
      handle(key, value, line.number);
    }
    finish_interval();
    finish_tier();
    if (!saw_class) throw ParseError(2, "missing Object class line");
    return std::move(tiers_);
  }

 private:
  struct PendingInterval {
    std::size_t line;
    std::string label;
    std::optional<double> xmin, xmax;
  };
  struct PendingTier {
    bool interval_tier = false;
    IntervalTier tier;
  };

  void handle(std::string_view key, std::string_view value, std::size_t line) {
    if (key == "class") {
      finish_interval();
      finish_tier();
      const auto cls = read_string(value, line);
      tier_ = PendingTier{cls == "IntervalTier", {}};
      return;
    }
    if (key == "name" && tier_) {
      tier_->tier.name = read_string(value, line);
      return;
    }
    if (key == "text" || key == "mark") {
      auto s = read_string(value, line);
      if (key == "text") {
        if (!interval_) throw ParseError(line, "interval text outside an interval");
        finish_interval_with(std::move(s), line);
      }
      return;
    }
    if (key == "xmin" || key == "xmax" || key == "number" || key == "size" ||
        key == "intervals: size" || key == "points: size") {
      const double v = parse_number(value, line, key);
      if (interval_) {
        if (key == "xmin") interval_->xmin = v;
        if (key == "xmax") interval_->xmax = v;
      }
      return;
    }
    if (key == "tiers?") return;
  }

  // Reads a quoted string starting within `value`, consuming continuation
  // lines when the closing quote is further down.
  std::string read_string(std::string_view value, std::size_t line) {
    auto t = trim(value);
    const auto open = t.find('"');
    if (open == std::string_view::npos) throw ParseError(line, "expected a quoted string");
    std::string out;
    std::string_view rest = t.substr(open + 1);
    for (;;) {
      std::size_t i = 0;
      while (i < rest.size()) {
        if (rest[i] == '"') {
          if (i + 1 < rest.size() && rest[i + 1] == '"') {
            out.push_back('"');
            i += 2;
            continue;
          }
          return out;
        }
        out.push_back(rest[i++]);
      }
      if (idx_ + 1 >= lines_.size()) throw ParseError(line, "unterminated string");
      ++idx_;
      out.push_back('\n');
      rest = lines_[idx_].text;
      if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    }
  }

  void finish_interval_with(std::string text, std::size_t text_line) {
    auto iv = std::move(*interval_);
    interval_.reset();
    if (!iv.xmin || !iv.xmax)
      throw ParseError(text_line, fmt::format("{} of tier '{}' lacks xmin or xmax", iv.label,
                                              tier_->tier.name));
    if (*iv.xmin > *iv.xmax)
      throw ParseError(iv.line, fmt::format("{} of tier '{}' has xmin {} > xmax {}", iv.label,
                                            tier_->tier.name, *iv.xmin, *iv.xmax));
    if (*iv.xmin < 0.0)
      throw ParseError(iv.line, fmt::format("{} of tier '{}' starts before 0", iv.label,
                                            tier_->tier.name));
    if (!tier_->interval_tier) return;
    auto& list = tier_->tier.intervals;
    if (!list.empty() && *iv.xmin < list.back().end_s - 1e-9)
      throw ParseError(iv.line, fmt::format("{} of tier '{}' overlaps the previous interval",
                                            iv.label, tier_->tier.name));
    if (*iv.xmin == *iv.xmax) return;
    LabeledSegment seg;
    seg.start_s = *iv.xmin;
    seg.end_s = *iv.xmax;
    seg.label = map_label(text, seg.unknown_label);
    seg.text = std::move(text);
    list.push_back(std::move(seg));
  }

  void finish_interval() {
    if (interval_)
      throw ParseError(interval_->line, interval_->label + " has no text field");
  }

  void finish_tier() {
    if (tier_ && tier_->interval_tier) tiers_.push_back(std::move(tier_->tier));
    tier_.reset();
  }

  std::vector<Line> lines_;
  std::size_t idx_ = 0;
  std::optional<PendingTier> tier_;
  std::optional<PendingInterval> interval_;
  std::vector<IntervalTier> tiers_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view label_text(const LabeledSegment& segment) {
  switch (segment.label) {
    case Label::kCryOnly: return "cry";
    case Label::kCryNoise: return "cry+noise";
    case Label::kNonCry: return segment.unknown_label ? std::string_view(segment.text) : "";
  }
  return "";
}

std::vector<IntervalTier> parse_textgrid(std::string_view text) { return Reader(text).run(); }

std::vector<IntervalTier> parse_textgrid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xFE)
    return parse_textgrid(std::string_view(decode_utf16(bytes.subspan(2), false)));
  if (bytes.size() >= 2 && bytes[0] == 0xFE && bytes[1] == 0xFF)
    return parse_textgrid(std::string_view(decode_utf16(bytes.subspan(2), true)));
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  return parse_textgrid(text);
}

std::vector<IntervalTier> read_textgrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_textgrid(std::span<const std::uint8_t>(bytes));
}

std::string serialize_textgrid(std::span<const IntervalTier> tiers, double xmin, double xmax) {
  std::string out;
  auto put = [&out](std::string_view indent, std::string_view s) {
    out.append(indent);
    out.append(s);
    out.push_back('\n');
  };
  put("", "File type = \"ooTextFile\"");
  put("", "Object class = \"TextGrid\"");
  put("", "");
  put("", fmt::format("xmin = {:.17g} ", xmin));
  put("", fmt::format("xmax = {:.17g} ", xmax));
  put("", "tiers? <exists> ");
  put("", fmt::format("size = {} ", tiers.size()));
  put("", "item []: ");
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    const auto& tier = tiers[t];
    put("    ", fmt::format("item [{}]:", t + 1));
    put("        ", "class = \"IntervalTier\" ");
    put("        ", fmt::format("name = {} ", quote(tier.name)));
    put("        ", fmt::format("xmin = {:.17g} ", xmin));
    put("        ", fmt::format("xmax = {:.17g} ", xmax));
    put("        ", fmt::format("intervals: size = {} ", tier.intervals.size()));
    for (std::size_t i = 0; i < tier.intervals.size(); ++i) {
      const auto& seg = tier.intervals[i];
      put("        ", fmt::format("intervals [{}]:", i + 1));
      put("            ", fmt::format("xmin = {:.17g} ", seg.start_s));
      put("            ", fmt::format("xmax = {:.17g} ", seg.end_s));
      put("            ", fmt::format("text = {} ", quote(label_text(seg))));
    }
  }
  return out;
}

void write_textgrid(const std::filesystem::path& path, std::span<const IntervalTier> tiers,
                    double xmin, double xmax) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write annotation file " + path.string());
  out << serialize_textgrid(tiers, xmin, xmax);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace crymodal
