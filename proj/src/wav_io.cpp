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

#include "crymodal/wav_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "crymodal/errors.hpp"

namespace crymodal {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const FmtChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                        static_cast<std::uint32_t>(p[2]) << 16 |
                        static_cast<std::uint32_t>(p[3]) << 24;
    return static_cast<double>(std::bit_cast<float>(raw));
  }
  if (fmt.bits == 16) {
    auto v = static_cast<std::int16_t>(p[0] | p[1] << 8);
    return v / 32768.0;
  }
  // 24-bit, sign-extended through the top byte.
  std::int32_t v = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) << 8 |
                                             static_cast<std::uint32_t>(p[1]) << 16 |
                                             static_cast<std::uint32_t>(p[2]) << 24) >>
                   8;
  return v / 8388608.0;
}

}  // namespace

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw FormatError("wav: truncated RIFF header");
  if (!tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
    throw FormatError("wav: not a RIFF/WAVE file");

  FmtChunk fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw FormatError("wav: truncated fmt chunk");
      fmt.format = read_u16(bytes, body);
      fmt.channels = read_u16(bytes, body + 2);
      fmt.sample_rate = read_u32(bytes, body + 4);
      fmt.block_align = read_u16(bytes, body + 12);
      fmt.bits = read_u16(bytes, body + 14);
      if (fmt.format == kFormatExtensible) {
        if (chunk_size < 40 || body + 40 > bytes.size())
          throw FormatError("wav: truncated WAVE_FORMAT_EXTENSIBLE header");
        // The first two bytes of the sub-format GUID carry the real tag.
        fmt.format = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      const std::size_t available = bytes.size() - body;
      data = bytes.subspan(body, std::min<std::size_t>(chunk_size, available));
      have_data = true;
      break;
    }
    // Chunks are word aligned.
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt) throw FormatError("wav: missing fmt chunk");
  if (!have_data) throw FormatError("wav: missing data chunk");
  if (fmt.channels == 0 || fmt.sample_rate == 0)
    throw FormatError("wav: zero channels or sample rate");
  if (fmt.channels > 2)
    throw UnsupportedFormatError("wav: " + std::to_string(fmt.channels) +
                                 " channels (only mono and stereo are decoded)");
  const bool pcm_ok = fmt.format == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool float_ok = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm_ok && !float_ok)
    throw UnsupportedFormatError("wav: format tag " + std::to_string(fmt.format) + " with " +
                                 std::to_string(fmt.bits) + " bits per sample");
  const std::size_t bytes_per_sample = fmt.bits / 8u;
  if (fmt.block_align != bytes_per_sample * fmt.channels)
    throw FormatError("wav: block_align inconsistent with channels and bit depth");

  Waveform w;
  w.sample_rate_hz = fmt.sample_rate;
  const std::size_t frames = data.size() / fmt.block_align;
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data.data() + i * fmt.block_align;
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) acc += decode_sample(frame + c * bytes_per_sample, fmt);
    w.samples[i] = acc / fmt.channels;
  }
  for (double s : w.samples)
    if (!std::isfinite(s)) throw FormatError("wav: non-finite float sample");
  return w;
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& w, WavEncoding encoding, int channels) {
  if (channels < 1 || channels > 2) throw DomainError("wav: channels must be 1 or 2");
  if (!(w.sample_rate_hz > 0.0)) throw DomainError("wav: sample rate must be positive");
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : encoding == WavEncoding::kPcm24 ? 24 : 32;
  const std::uint16_t format = encoding == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const std::uint16_t block_align = static_cast<std::uint16_t>(bits / 8 * channels);
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate_hz));
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, rate);
  put_u32(out, rate * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);

  for (double s : w.samples) {
    for (int c = 0; c < channels; ++c) {
      switch (encoding) {
        case WavEncoding::kPcm16: {
          const double v = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
          put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
          break;
        }
        case WavEncoding::kPcm24: {
          const double v = std::clamp(std::round(s * 8388608.0), -8388608.0, 8388607.0);
          const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v));
          out.push_back(static_cast<std::uint8_t>(u));
          out.push_back(static_cast<std::uint8_t>(u >> 8));
          out.push_back(static_cast<std::uint8_t>(u >> 16));
          break;
        }
        case WavEncoding::kFloat32:
          put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
          break;
      }
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding,
               int channels) {
  const auto bytes = encode_wav(w, encoding, channels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace crymodal
