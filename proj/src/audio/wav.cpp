// src/audio/wav.cpp

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

#include "medleysep/audio/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "medleysep/common/error.h"

namespace medleysep {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(at));
}

}  // namespace

double quantize_pcm16(double v) {
  const double q = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
  return q / 32768.0;
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& x, WavFormat format) {
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto data_bytes = static_cast<std::uint32_t>(x.size() * block);
  const auto rate = static_cast<std::uint32_t>(x.sample_rate());

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double v : x.samples()) {
    if (format == WavFormat::kPcm16) {
      const auto q = static_cast<std::int16_t>(quantize_pcm16(v) * 32768.0);
      put_u16(out, static_cast<std::uint16_t>(q));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

AudioBuffer decode_wav(std::span<const std::uint8_t> b, const std::string& origin) {
  auto fail = [&](const std::string& why) -> IoError { return IoError(origin + ": " + why); };
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE"))
    throw fail("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size() && !tag_is(b, pos, "data")) throw fail("truncated chunk");
    if (tag_is(b, pos, "fmt ")) {
      if (size < 16) throw fail("fmt chunk too short");
      format = get_u16(b, body);
      channels = get_u16(b, body + 2);
      rate = get_u32(b, body + 4);
      bits = get_u16(b, body + 14);
      if (format == kFormatExtensible) {
        if (size < 26) throw fail("extensible fmt chunk too short");
        format = get_u16(b, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(b, pos, "data")) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (channels != 1) throw fail("only mono audio is supported, got " + std::to_string(channels) + " channels");
      const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
      std::vector<double> samples;
      if (format == kFormatPcm && bits == 16) {
        samples.resize(avail / 2);
        for (std::size_t i = 0; i < samples.size(); ++i)
          samples[i] = static_cast<std::int16_t>(get_u16(b, body + 2 * i)) / 32768.0;
      } else if (format == kFormatFloat && bits == 32) {
        samples.resize(avail / 4);
        for (std::size_t i = 0; i < samples.size(); ++i)
          samples[i] = std::bit_cast<float>(get_u32(b, body + 4 * i));
      } else {
        throw fail("unsupported sample format (tag " + std::to_string(format) + ", " +
                   std::to_string(bits) + " bits); expected PCM16 or float32");
      }
      try {
        return AudioBuffer(std::move(samples), static_cast<int>(rate));
      } catch (const std::invalid_argument& e) {
        throw fail(e.what());
      }
    }
    pos = body + size + (size & 1u);
  }
  throw fail("no data chunk");
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& x, WavFormat format) {
  const auto bytes = encode_wav(x, format);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError(path.string() + ": write failed");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string());
}

AudioBuffer wav_round_trip(const AudioBuffer& x, WavFormat format) {
  return decode_wav(encode_wav(x, format), "<memory>");
}

}  // namespace medleysep
