// src/mixer/mix_policy.cpp

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

#include "medleysep/mixer/mix_policy.h"

#include <stdexcept>
#include <string>

namespace medleysep {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string("MixPolicy: ") + name + " must be in [0, 1]");
}

}  // namespace

void MixPolicy::validate() const {
  if (category == Category::kNSinging)
    throw std::invalid_argument("MixPolicy: n_singing mixtures are not constructed for training");
  check_probability(p_same_singer, "p_same_singer");
  check_probability(p_same_song, "p_same_song");
  check_probability(p_speech, "p_speech");
  if (n_rest_range[0] < 1 || n_rest_range[1] > 3 || n_rest_range[0] > n_rest_range[1])
    throw std::invalid_argument("MixPolicy: n_rest_range must lie within [1, 3] (2 to 4 singings in total)");
  if (detune_cents_range[0] < -20.0 || detune_cents_range[1] > 20.0 ||
      detune_cents_range[0] > detune_cents_range[1])
    throw std::invalid_argument("MixPolicy: detune_cents_range must lie within [-20, 20]");
  if (octave_choices.empty()) throw std::invalid_argument("MixPolicy: octave_choices is empty");
  for (double o : octave_choices)
    if (o != -1200.0 && o != 0.0 && o != 1200.0)
      throw std::invalid_argument("MixPolicy: octave choices must be -1200, 0 or +1200 cents");
  if (!(formant_ratio_range[0] > 0.0) || formant_ratio_range[0] > formant_ratio_range[1])
    throw std::invalid_argument("MixPolicy: formant_ratio_range must be positive and ordered");
  if (gain_range_db[0] > gain_range_db[1]) throw std::invalid_argument("MixPolicy: gain_range_db unordered");
  if (!(main_margin_db > 0.0)) throw std::invalid_argument("MixPolicy: main_margin_db must be positive");
  if (!(chunk_seconds > 0.0)) throw std::invalid_argument("MixPolicy: chunk_seconds must be positive");
}

}  // namespace medleysep
