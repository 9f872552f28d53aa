// include/medleysep/mixer/voice_transforms.h

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

#ifndef MEDLEYSEP_MIXER_VOICE_TRANSFORMS_H_
#define MEDLEYSEP_MIXER_VOICE_TRANSFORMS_H_

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

inline constexpr double kMaxPitchShiftCents = 1220.0;

// Duration-preserving pitch shift by a phase vocoder that remaps each
// analysis bin's instantaneous frequency by 2^(cents/1200). A zero shift
// returns the input unchanged. |cents| must not exceed 1220.
AudioBuffer pitch_shift(const AudioBuffer& x, double cents);

// Warps the cepstral spectral envelope along frequency by `ratio` while
// keeping the excitation (and so the fundamental) in place. ratio == 1
// returns the input unchanged.
AudioBuffer formant_shift(const AudioBuffer& x, double ratio);

// Analysis size used by both transforms at a given rate.
int voice_transform_fft_size(int sample_rate);

}  // namespace medleysep

#endif  // MEDLEYSEP_MIXER_VOICE_TRANSFORMS_H_
