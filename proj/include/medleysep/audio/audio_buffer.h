// include/medleysep/audio/audio_buffer.h

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

#ifndef MEDLEYSEP_AUDIO_AUDIO_BUFFER_H_
#define MEDLEYSEP_AUDIO_AUDIO_BUFFER_H_

#include <cstddef>
#include <span>
#include <vector>

namespace medleysep {

// Sample rates accepted at pipeline entry points (training, evaluation).
inline constexpr int kPipelineRates[] = {16000, 24000, 44100};

bool is_pipeline_rate(int sample_rate);

// Mono waveform. Immutable once constructed: every transform returns a new
// buffer. Samples are non-empty and finite; the rate is a positive integer.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<double> samples, int sample_rate);

  // All-zero buffer of the given length.
  static AudioBuffer zeros(std::size_t length, int sample_rate);

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& vec() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }
  double duration_seconds() const;

  AudioBuffer scaled(double gain) const;
  // Copy of [offset, offset + length); zero-padded past the end.
  AudioBuffer slice(std::size_t offset, std::size_t length) const;

  double peak() const;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

// Sample-wise sum of equal-length, equal-rate buffers, accumulated left to right.
AudioBuffer sum_buffers(std::span<const AudioBuffer> buffers);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_AUDIO_BUFFER_H_
