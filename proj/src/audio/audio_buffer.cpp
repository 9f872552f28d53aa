// src/audio/audio_buffer.cpp

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

#include "medleysep/audio/audio_buffer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace medleysep {

bool is_pipeline_rate(int sample_rate) {
  return std::find(std::begin(kPipelineRates), std::end(kPipelineRates), sample_rate) !=
         std::end(kPipelineRates);
}

AudioBuffer::AudioBuffer(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) throw std::invalid_argument("AudioBuffer: empty sample sequence");
  if (sample_rate_ <= 0)
    throw std::invalid_argument("AudioBuffer: sample rate must be positive, got " +
                                std::to_string(sample_rate_));
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i]))
      throw std::invalid_argument("AudioBuffer: non-finite sample at index " + std::to_string(i));
  }
}

AudioBuffer AudioBuffer::zeros(std::size_t length, int sample_rate) {
  return AudioBuffer(std::vector<double>(length, 0.0), sample_rate);
}

double AudioBuffer::duration_seconds() const {
  return static_cast<double>(samples_.size()) / sample_rate_;
}

AudioBuffer AudioBuffer::scaled(double gain) const {
  std::vector<double> out(samples_);
  for (auto& v : out) v *= gain;
  return AudioBuffer(std::move(out), sample_rate_);
}

AudioBuffer AudioBuffer::slice(std::size_t offset, std::size_t length) const {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length && offset + i < samples_.size(); ++i)
    out[i] = samples_[offset + i];
  return AudioBuffer(std::move(out), sample_rate_);
}

double AudioBuffer::peak() const {
  double p = 0.0;
  for (double v : samples_) p = std::max(p, std::abs(v));
  return p;
}

AudioBuffer sum_buffers(std::span<const AudioBuffer> buffers) {
  if (buffers.empty()) throw std::invalid_argument("sum_buffers: no buffers");
  const std::size_t n = buffers.front().size();
  const int rate = buffers.front().sample_rate();
  std::vector<double> out(buffers.front().vec());
  for (std::size_t b = 1; b < buffers.size(); ++b) {
    if (buffers[b].size() != n || buffers[b].sample_rate() != rate)
      throw std::invalid_argument("sum_buffers: length or rate mismatch");
    for (std::size_t i = 0; i < n; ++i) out[i] += buffers[b][i];
  }
  return AudioBuffer(std::move(out), rate);
}

}  // namespace medleysep
