// include/medleysep/audio/loudness.h

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

#ifndef MEDLEYSEP_AUDIO_LOUDNESS_H_
#define MEDLEYSEP_AUDIO_LOUDNESS_H_

#include <span>

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

inline constexpr double kLoudnessEpsilon = 1e-12;

double rms(std::span<const double> x);

// 20 log10(RMS + 1e-12), in dB.
double loudness_db(std::span<const double> x);
inline double loudness_db(const AudioBuffer& x) { return loudness_db(x.samples()); }

// Gain that brings x to the target RMS level (1 for digital silence).
double gain_to_loudness(std::span<const double> x, double target_db);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_LOUDNESS_H_
