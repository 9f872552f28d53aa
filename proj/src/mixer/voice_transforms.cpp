// src/mixer/voice_transforms.cpp

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

#include "medleysep/mixer/voice_transforms.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "medleysep/audio/fft.h"
#include "medleysep/audio/stft.h"

namespace medleysep {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

StftConfig transform_config(int sample_rate) {
  const int n = voice_transform_fft_size(sample_rate);
  return StftConfig{n, n, n / 4, WindowKind::kHann, true};
}

double wrap_phase(double p) {
  p = std::fmod(p + std::numbers::pi, kTwoPi);
  if (p < 0) p += kTwoPi;
  return p - std::numbers::pi;
}

// Number of cepstral coefficients kept for the envelope.
std::size_t lifter_cutoff(int sample_rate) {
  return std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(sample_rate * 0.00125)));
}

}  // namespace

int voice_transform_fft_size(int sample_rate) { return sample_rate >= 22050 ? 2048 : 1024; }

AudioBuffer pitch_shift(const AudioBuffer& x, double cents) {
  if (!(std::abs(cents) <= kMaxPitchShiftCents))
    throw std::invalid_argument("pitch_shift: |cents| must be <= 1220, got " + std::to_string(cents));
  if (std::abs(cents) < 1e-9) return x;

  const double factor = std::pow(2.0, cents / 1200.0);
  const auto cfg = transform_config(x.sample_rate());
  const auto spec = stft(x, cfg);
  const std::size_t bins = spec.bins();
  const double n = cfg.fft_size;
  const double hop = cfg.hop_size;
  const double bins_per_radian = n / (kTwoPi * hop);

  ComplexSpectrogram out(spec.frames(), cfg, x.sample_rate());
  std::vector<double> last_phase(bins, 0.0), synth_phase(bins, 0.0);
  std::vector<double> mag(bins), freq(bins);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    std::fill(mag.begin(), mag.end(), 0.0);
    std::fill(freq.begin(), freq.end(), 0.0);
    for (std::size_t k = 0; k < bins; ++k) {
      const auto c = spec.at(t, k);
      const double phase = std::arg(c);
      const double expected = kTwoPi * hop * static_cast<double>(k) / n;
      const double deviation = wrap_phase(phase - last_phase[k] - expected);
      last_phase[k] = phase;
      const double true_bin = static_cast<double>(k) + deviation * bins_per_radian;
      const auto target = static_cast<std::size_t>(std::lround(static_cast<double>(k) * factor));
      if (target < bins) {
        mag[target] += std::abs(c);
        freq[target] = true_bin * factor;
      }
    }
    for (std::size_t k = 0; k < bins; ++k) {
      synth_phase[k] = wrap_phase(synth_phase[k] + kTwoPi * hop * freq[k] / n);
      out.at(t, k) = std::polar(mag[k], synth_phase[k]);
    }
  }
  return istft(out, x.size());
}

constexpr int kEnvelopeIterations = 40;
constexpr double kEnvelopeRangeNepers = 9.2;  // 80 dB below the frame peak

AudioBuffer formant_shift(const AudioBuffer& x, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw std::invalid_argument("formant_shift: ratio must be positive");
  if (ratio == 1.0) return x;

  const auto cfg = transform_config(x.sample_rate());
  auto spec = stft(x, cfg);
  const std::size_t bins = spec.bins();
  const auto n = static_cast<std::size_t>(cfg.fft_size);
  const std::size_t keep = lifter_cutoff(x.sample_rate());

  std::vector<std::complex<double>> half(bins);
  std::vector<double> cepstrum(n), envelope(bins), target(bins);
  // Cepstral smoothing of `target` into `envelope`.
  auto smooth = [&] {
    for (std::size_t k = 0; k < bins; ++k) half[k] = target[k];
    irfft(half, cepstrum);
    for (std::size_t q = keep; q + keep <= n; ++q) cepstrum[q] = 0.0;
    rfft(cepstrum, half);
    for (std::size_t k = 0; k < bins; ++k) envelope[k] = half[k].real();
  };
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    double peak = 0.0;
    for (std::size_t k = 0; k < bins; ++k) peak = std::max(peak, std::abs(spec.at(t, k)));
    if (peak <= 0.0) continue;
    const double floor = std::log(peak) - kEnvelopeRangeNepers;
    std::vector<double> logmag(bins);
    for (std::size_t k = 0; k < bins; ++k) logmag[k] = std::max(std::log(std::abs(spec.at(t, k)) + 1e-300), floor);
    // True envelope: repeatedly lift the smoothed curve onto the spectral peaks.
    target = logmag;
    smooth();
    for (int it = 0; it < kEnvelopeIterations; ++it) {
      for (std::size_t k = 0; k < bins; ++k) target[k] = std::max(logmag[k], envelope[k]);
      smooth();
    }
    for (std::size_t k = 0; k < bins; ++k) {
      const double src = std::min(static_cast<double>(k) / ratio, static_cast<double>(bins - 1));
      const auto lo = static_cast<std::size_t>(src);
      const std::size_t hi = std::min(lo + 1, bins - 1);
      const double frac = src - static_cast<double>(lo);
      const double warped = envelope[lo] + frac * (envelope[hi] - envelope[lo]);
      spec.at(t, k) *= std::exp(warped - envelope[k]);
    }
  }
  return istft(spec, x.size());
}

}  // namespace medleysep
