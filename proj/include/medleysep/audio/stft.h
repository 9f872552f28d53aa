// include/medleysep/audio/stft.h

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

#ifndef MEDLEYSEP_AUDIO_STFT_H_
#define MEDLEYSEP_AUDIO_STFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

enum class WindowKind { kHann, kHamming, kRectangular };

std::string to_string(WindowKind kind);
WindowKind window_from_string(const std::string& name);

struct StftConfig {
  int fft_size = 1024;
  int win_size = 1024;
  int hop_size = 256;
  WindowKind window = WindowKind::kHann;
  bool center_pad = true;

  int bins() const { return fft_size / 2 + 1; }
  // Leading zero padding applied before framing.
  int pad() const { return center_pad ? fft_size / 2 : 0; }
  // ceil((length + pad) / hop).
  std::size_t frames_for(std::size_t length) const;
  // Throws std::invalid_argument unless hop <= win <= fft and fft is even.
  void validate() const;
  // Analysis window of length fft_size (win_size taper centred, zero padded).
  std::vector<double> window_samples() const;

  bool operator==(const StftConfig&) const = default;
};

// Default analysis setup at 24 kHz.
StftConfig default_stft_config();

// One-sided spectrogram, row-major [frames x bins].
class ComplexSpectrogram {
 public:
  ComplexSpectrogram(std::size_t frames, StftConfig config, int sample_rate);
  ComplexSpectrogram(std::vector<std::complex<double>> data, std::size_t frames,
                     StftConfig config, int sample_rate);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return static_cast<std::size_t>(config_.bins()); }
  const StftConfig& config() const { return config_; }
  int sample_rate() const { return sample_rate_; }

  std::complex<double>& at(std::size_t frame, std::size_t bin) { return data_[frame * bins() + bin]; }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return data_[frame * bins() + bin];
  }
  std::span<std::complex<double>> data() { return data_; }
  std::span<const std::complex<double>> data() const { return data_; }

  bool same_shape(const ComplexSpectrogram& other) const;

 private:
  std::vector<std::complex<double>> data_;
  std::size_t frames_;
  StftConfig config_;
  int sample_rate_;
};

ComplexSpectrogram stft(const AudioBuffer& x, const StftConfig& cfg);
ComplexSpectrogram stft(std::span<const double> x, const StftConfig& cfg, int sample_rate);

// Weighted overlap-add inverse. out_len must be within one frame of the
// length the spectrogram was computed from.
AudioBuffer istft(const ComplexSpectrogram& spec, std::size_t out_len);
std::vector<double> istft_samples(const ComplexSpectrogram& spec, std::size_t out_len);

// Adjoint of stft: maps dL/dRe, dL/dIm (packed as complex numbers) to dL/dx.
std::vector<double> stft_adjoint(const ComplexSpectrogram& grad, std::size_t signal_len);
// Adjoint of istft: maps dL/dy to dL/dRe, dL/dIm of the spectrogram.
ComplexSpectrogram istft_adjoint(std::span<const double> grad, std::size_t frames,
                                 const StftConfig& cfg, int sample_rate);

// Sum over frames of squared window, sampled at each output position.
std::vector<double> window_square_envelope(const StftConfig& cfg, std::size_t frames,
                                           std::size_t out_len);

// sum_t sum_k c_k |S(t,k)|^2 / fft_size, with c_k the one-sided fold weights.
// Equals sum_n x[n]^2 * envelope[n] (Parseval per frame).
double spectral_energy(const ComplexSpectrogram& spec);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_STFT_H_
