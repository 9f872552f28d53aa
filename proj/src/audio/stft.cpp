// src/audio/stft.cpp

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

#include "medleysep/audio/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "medleysep/audio/fft.h"

namespace medleysep {
namespace {

// Envelope values below this fraction of the peak are treated as uncovered.
constexpr double kEnvelopeFloor = 1e-10;

std::size_t padded_length(const StftConfig& cfg, std::size_t frames) {
  return (frames - 1) * static_cast<std::size_t>(cfg.hop_size) + static_cast<std::size_t>(cfg.fft_size);
}

double fold_weight(std::size_t k, std::size_t bins) {
  return (k == 0 || k + 1 == bins) ? 1.0 : 2.0;
}

// Sum of squared windows over the padded frame grid.
std::vector<double> padded_envelope(const StftConfig& cfg, const std::vector<double>& w,
                                    std::size_t frames) {
  std::vector<double> env(padded_length(cfg, frames), 0.0);
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * static_cast<std::size_t>(cfg.hop_size);
    for (std::size_t i = 0; i < n; ++i) env[start + i] += w[i] * w[i];
  }
  return env;
}

double envelope_threshold(const std::vector<double>& env) {
  const double peak = env.empty() ? 0.0 : *std::max_element(env.begin(), env.end());
  return peak * kEnvelopeFloor;
}

void check_out_len(const ComplexSpectrogram& spec, std::size_t out_len) {
  if (out_len == 0) throw std::invalid_argument("istft: out_len must be positive");
  const std::size_t expected = spec.config().frames_for(out_len);
  const std::size_t have = spec.frames();
  const std::size_t diff = expected > have ? expected - have : have - expected;
  if (diff > 1)
    throw std::invalid_argument("istft: out_len " + std::to_string(out_len) + " implies " +
                                std::to_string(expected) + " frames but spectrogram has " +
                                std::to_string(have));
}

}  // namespace

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::kHann: return "hann";
    case WindowKind::kHamming: return "hamming";
    case WindowKind::kRectangular: return "rectangular";
  }
  return "hann";
}

WindowKind window_from_string(const std::string& name) {
  if (name == "hann") return WindowKind::kHann;
  if (name == "hamming") return WindowKind::kHamming;
  if (name == "rectangular") return WindowKind::kRectangular;
  throw std::invalid_argument("unknown window '" + name + "'");
}

std::size_t StftConfig::frames_for(std::size_t length) const {
  const std::size_t total = length + static_cast<std::size_t>(pad());
  const auto hop = static_cast<std::size_t>(hop_size);
  return std::max<std::size_t>(1, (total + hop - 1) / hop);
}

void StftConfig::validate() const {
  if (fft_size <= 0 || fft_size % 2 != 0)
    throw std::invalid_argument("StftConfig: fft_size must be positive and even");
  if (hop_size <= 0 || hop_size > win_size || win_size > fft_size)
    throw std::invalid_argument("StftConfig: require 0 < hop <= win <= fft (got hop " +
                                std::to_string(hop_size) + ", win " + std::to_string(win_size) +
                                ", fft " + std::to_string(fft_size) + ")");
}

std::vector<double> StftConfig::window_samples() const {
  std::vector<double> w(static_cast<std::size_t>(fft_size), 0.0);
  const int offset = (fft_size - win_size) / 2;
  for (int n = 0; n < win_size; ++n) {
    const double phase = 2.0 * std::numbers::pi * n / win_size;
    double v = 1.0;
    switch (window) {
      case WindowKind::kHann: v = 0.5 - 0.5 * std::cos(phase); break;
      case WindowKind::kHamming: v = 0.54 - 0.46 * std::cos(phase); break;
      case WindowKind::kRectangular: v = 1.0; break;
    }
    w[static_cast<std::size_t>(offset + n)] = v;
  }
  return w;
}

StftConfig default_stft_config() { return StftConfig{}; }

ComplexSpectrogram::ComplexSpectrogram(std::size_t frames, StftConfig config, int sample_rate)
    : data_(frames * static_cast<std::size_t>(config.bins())),
      frames_(frames),
      config_(config),
      sample_rate_(sample_rate) {
  config_.validate();
}

ComplexSpectrogram::ComplexSpectrogram(std::vector<std::complex<double>> data, std::size_t frames,
                                       StftConfig config, int sample_rate)
    : data_(std::move(data)), frames_(frames), config_(config), sample_rate_(sample_rate) {
  config_.validate();
  if (data_.size() != frames_ * bins())
    throw std::invalid_argument("ComplexSpectrogram: data size does not match frames x bins");
  for (const auto& c : data_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("ComplexSpectrogram: non-finite coefficient");
  }
}

bool ComplexSpectrogram::same_shape(const ComplexSpectrogram& other) const {
  return frames_ == other.frames_ && config_ == other.config_;
}

ComplexSpectrogram stft(const AudioBuffer& x, const StftConfig& cfg) {
  return stft(x.samples(), cfg, x.sample_rate());
}

ComplexSpectrogram stft(std::span<const double> x, const StftConfig& cfg, int sample_rate) {
  cfg.validate();
  if (x.empty()) throw std::invalid_argument("stft: empty input");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw std::invalid_argument("stft: non-finite input sample at index " + std::to_string(i));
  }
  const std::size_t frames = cfg.frames_for(x.size());
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const auto pad = static_cast<std::size_t>(cfg.pad());
  std::vector<double> buf(padded_length(cfg, frames), 0.0);
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(pad));

  const auto w = cfg.window_samples();
  ComplexSpectrogram out(frames, cfg, sample_rate);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) frame[i] = buf[t * hop + i] * w[i];
    rfft(frame, out.data().subspan(t * out.bins(), out.bins()));
  }
  return out;
}

std::vector<double> istft_samples(const ComplexSpectrogram& spec, std::size_t out_len) {
  check_out_len(spec, out_len);
  const auto& cfg = spec.config();
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const auto pad = static_cast<std::size_t>(cfg.pad());
  const auto w = cfg.window_samples();
  const auto env = padded_envelope(cfg, w, spec.frames());

  std::vector<double> buf(env.size(), 0.0);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    irfft(spec.data().subspan(t * spec.bins(), spec.bins()), frame);
    for (std::size_t i = 0; i < n; ++i) buf[t * hop + i] += frame[i] * w[i];
  }
  const double floor = envelope_threshold(env);
  std::vector<double> y(out_len, 0.0);
  for (std::size_t m = 0; m < out_len && m + pad < buf.size(); ++m) {
    const double e = env[m + pad];
    if (e > floor) y[m] = buf[m + pad] / e;
  }
  return y;
}

AudioBuffer istft(const ComplexSpectrogram& spec, std::size_t out_len) {
  return AudioBuffer(istft_samples(spec, out_len), spec.sample_rate());
}

std::vector<double> stft_adjoint(const ComplexSpectrogram& grad, std::size_t signal_len) {
  const auto& cfg = grad.config();
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const auto pad = static_cast<std::size_t>(cfg.pad());
  const std::size_t bins = grad.bins();
  const auto w = cfg.window_samples();

  std::vector<double> buf(padded_length(cfg, grad.frames()), 0.0);
  std::vector<std::complex<double>> half(bins);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < grad.frames(); ++t) {
    for (std::size_t k = 0; k < bins; ++k) half[k] = grad.at(t, k) / fold_weight(k, bins);
    irfft(half, frame);
    for (std::size_t i = 0; i < n; ++i) buf[t * hop + i] += frame[i] * static_cast<double>(n) * w[i];
  }
  std::vector<double> out(signal_len, 0.0);
  for (std::size_t m = 0; m < signal_len && m + pad < buf.size(); ++m) out[m] = buf[m + pad];
  return out;
}

ComplexSpectrogram istft_adjoint(std::span<const double> grad, std::size_t frames,
                                 const StftConfig& cfg, int sample_rate) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const auto pad = static_cast<std::size_t>(cfg.pad());
  const auto w = cfg.window_samples();
  const auto env = padded_envelope(cfg, w, frames);
  const double floor = envelope_threshold(env);

  std::vector<double> h(env.size(), 0.0);
  for (std::size_t m = 0; m < grad.size() && m + pad < h.size(); ++m) {
    const double e = env[m + pad];
    if (e > floor) h[m + pad] = grad[m] / e;
  }
  ComplexSpectrogram out(frames, cfg, sample_rate);
  const std::size_t bins = out.bins();
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) frame[i] = h[t * hop + i] * w[i];
    auto row = out.data().subspan(t * bins, bins);
    rfft(frame, row);
    for (std::size_t k = 0; k < bins; ++k) row[k] *= fold_weight(k, bins) / static_cast<double>(n);
    row[0].imag(0.0);
    row[bins - 1].imag(0.0);
  }
  return out;
}

std::vector<double> window_square_envelope(const StftConfig& cfg, std::size_t frames,
                                           std::size_t out_len) {
  const auto env = padded_envelope(cfg, cfg.window_samples(), frames);
  const auto pad = static_cast<std::size_t>(cfg.pad());
  std::vector<double> out(out_len, 0.0);
  for (std::size_t m = 0; m < out_len && m + pad < env.size(); ++m) out[m] = env[m + pad];
  return out;
}

double spectral_energy(const ComplexSpectrogram& spec) {
  double acc = 0.0;
  const std::size_t bins = spec.bins();
  for (std::size_t t = 0; t < spec.frames(); ++t)
    for (std::size_t k = 0; k < bins; ++k) acc += fold_weight(k, bins) * std::norm(spec.at(t, k));
  return acc / spec.config().fft_size;
}

}  // namespace medleysep
