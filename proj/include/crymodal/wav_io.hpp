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
#include <vector>

#include "crymodal/waveform.hpp"

namespace crymodal {

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

// Decodes a RIFF/WAVE byte image. Stereo is averaged to mono and integer
// PCM is scaled by 1/2^(bits-1).
Waveform decode_wav(std::span<const std::uint8_t> bytes);
Waveform read_wav(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_wav(const Waveform& w, WavEncoding encoding,
                                     int channels = 1);
// Integer encodings clip to [-1, 1 - 1 LSB]. With channels > 1 the mono
// signal is duplicated into every channel.
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::kFloat32, int channels = 1);

}  // namespace crymodal
