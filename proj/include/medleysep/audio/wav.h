// include/medleysep/audio/wav.h

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MEDLEYSEP_AUDIO_WAV_H_
#define MEDLEYSEP_AUDIO_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE encoders. PCM16 clamps to [-1, 1) and rounds to the nearest
// of the 65536 levels; float32 stores float(x).
std::vector<std::uint8_t> encode_wav(const AudioBuffer& x, WavFormat format);
// Accepts PCM16 and IEEE float32 mono (plain or WAVE_FORMAT_EXTENSIBLE).
// `origin` names the source in error messages.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes, const std::string& origin);

void write_wav(const std::filesystem::path& path, const AudioBuffer& x, WavFormat format);
AudioBuffer read_wav(const std::filesystem::path& path);

// Encode + decode through the given format without touching the filesystem.
AudioBuffer wav_round_trip(const AudioBuffer& x, WavFormat format);

// The value a sample takes after PCM16 quantisation.
double quantize_pcm16(double v);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_WAV_H_
