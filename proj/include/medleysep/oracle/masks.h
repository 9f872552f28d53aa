// include/medleysep/oracle/masks.h

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

#ifndef MEDLEYSEP_ORACLE_MASKS_H_
#define MEDLEYSEP_ORACLE_MASKS_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/audio/stft.h"

namespace medleysep {

inline constexpr double kIrmEps = 1e-8;
inline constexpr double kCirmDelta = 1e-8;

// Time-frequency mask laid out like ComplexSpectrogram (frame-major).
template <class T>
struct TfMask {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<T> values;

  TfMask() = default;
  TfMask(std::size_t f, std::size_t b, T fill = T{}) : frames(f), bins(b), values(f * b, fill) {}
  T& at(std::size_t t, std::size_t k) { return values[t * bins + k]; }
  const T& at(std::size_t t, std::size_t k) const { return values[t * bins + k]; }
};
using RealMask = TfMask<double>;
using ComplexMask = TfMask<std::complex<double>>;

// Ideal binary masks: 1 where a source has the largest magnitude (ties go to
// the lowest index). Stems must share shape (std::invalid_argument).
std::vector<RealMask> ibm(std::span<const ComplexSpectrogram> stems);
// Ideal ratio masks |S_i| / (sum_j |S_j| + eps).
std::vector<RealMask> irm(std::span<const ComplexSpectrogram> stems);
// Complex ideal ratio mask S / X where |X| > delta, else 0. Unclipped.
ComplexMask cirm(const ComplexSpectrogram& stem, const ComplexSpectrogram& mixture);

// iSTFT of mask * X, cut or zero padded to out_len.
AudioBuffer apply_mask(const RealMask& mask, const ComplexSpectrogram& mixture, std::size_t out_len);
AudioBuffer apply_mask(const ComplexMask& mask, const ComplexSpectrogram& mixture, std::size_t out_len);

enum class OracleKind { kIbm, kIrm, kCirm };
std::string to_string(OracleKind k);
OracleKind oracle_from_string(const std::string& name);

// Oracle estimates of every stem from its mixture.
std::vector<AudioBuffer> oracle_separate(OracleKind kind, std::span<const AudioBuffer> stems,
                                         const AudioBuffer& mixture, const StftConfig& config);

}  // namespace medleysep

#endif  // MEDLEYSEP_ORACLE_MASKS_H_
