// include/medleysep/separators/heuristic.h

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

#ifndef MEDLEYSEP_SEPARATORS_HEURISTIC_H_
#define MEDLEYSEP_SEPARATORS_HEURISTIC_H_

#include <span>
#include <vector>

#include "medleysep/audio/stft.h"
#include "medleysep/nn/autograd.h"
#include "medleysep/oracle/masks.h"

namespace medleysep {

inline constexpr double kHeuristicEps = 1e-8;

// round(hz * fft / rate); throws unless 0 < bin < bins.
std::size_t boundary_bin(double boundary_hz, const StftConfig& config, int sample_rate);

// Per source: below the boundary the estimate's own magnitude; above it the
// mixture magnitude weighted by the source's share of low-band magnitude in
// that frame. Results use the spectrogram (frame-major) layout.
std::vector<RealMask> heuristic_stft(const ComplexSpectrogram& mixture,
                                     std::span<const ComplexSpectrogram> initial_estimates, std::size_t boundary);

// Differentiable form on bin-major magnitudes: mixture [F*T] (constant),
// estimates [S, F, T]. Returns [S, F, T].
nn::Var heuristic_magnitudes(const Eigen::ArrayXd& mixture_mag, const nn::Var& estimate_mags, std::size_t boundary);

}  // namespace medleysep

#endif  // MEDLEYSEP_SEPARATORS_HEURISTIC_H_
