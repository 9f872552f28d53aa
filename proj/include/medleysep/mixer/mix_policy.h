// include/medleysep/mixer/mix_policy.h

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

#ifndef MEDLEYSEP_MIXER_MIX_POLICY_H_
#define MEDLEYSEP_MIXER_MIX_POLICY_H_

#include <array>
#include <vector>

#include "medleysep/corpus/medleyvox.h"

namespace medleysep {

// Parameters of on-the-fly mixture construction.
struct MixPolicy {
  Category category = Category::kDuet;
  double p_same_singer = 0.1;
  double p_same_song = 0.1;
  double p_speech = 0.3;
  std::array<int, 2> n_rest_range{1, 3};
  std::array<double, 2> detune_cents_range{-20.0, 20.0};
  std::vector<double> octave_choices{-1200.0, 0.0, 1200.0};
  std::array<double, 2> formant_ratio_range{0.9, 1.1};
  std::array<double, 2> gain_range_db{-5.0, 0.0};
  double main_margin_db = 1.0;
  double chunk_seconds = 3.0;
  // Every chunk is brought to this RMS level before the gain draw.
  double normalize_db = -20.0;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

}  // namespace medleysep

#endif  // MEDLEYSEP_MIXER_MIX_POLICY_H_
