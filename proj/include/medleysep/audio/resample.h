// include/medleysep/audio/resample.h

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

#ifndef MEDLEYSEP_AUDIO_RESAMPLE_H_
#define MEDLEYSEP_AUDIO_RESAMPLE_H_

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

// Band-limited (Kaiser-windowed sinc) sample-rate conversion. The output has
// round(len * target / source) samples; equal rates return an exact copy.
AudioBuffer resample(const AudioBuffer& x, int target_rate);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_RESAMPLE_H_
