// include/medleysep/mixer/mixture.h

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

#ifndef MEDLEYSEP_MIXER_MIXTURE_H_
#define MEDLEYSEP_MIXER_MIXTURE_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/common/random.h"
#include "medleysep/mixer/mix_policy.h"

namespace medleysep {

// How the utterances of a mixture were related when drawn.
enum class PairKind { kIndependent, kSameSinger, kSameSong, kSelf };

std::string to_string(PairKind k);

// What happened to one input utterance on its way into the mixture.
struct SourceProvenance {
  std::string utterance_id;
  std::string singer_id;
  std::string song_id;
  double offset_seconds = 0.0;
  double gain_db = 0.0;
  double octave_cents = 0.0;
  double detune_cents = 0.0;
  double formant_ratio = 1.0;
  bool transformed = false;  // pitch/formant transforms applied
  bool in_rest = false;      // summed into the rest stem (main_vs_rest)
};

// A training mixture. mixture[n] == sources[0][n] + sources[1][n] exactly.
// main_vs_rest examples hold (main, rest_sum) with the main louder by at
// least the policy margin.
struct MixtureExample {
  AudioBuffer mixture;
  std::vector<AudioBuffer> sources;
  Category category = Category::kDuet;
  PairKind pair_kind = PairKind::kIndependent;
  std::vector<SourceProvenance> provenance;
};

// The chosen main chunk stayed below -60 dB after repeated offset draws.
class SilentSourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSilenceThresholdDb = -60.0;

// An utterance and its example-ready audio (already at the pipeline rate).
struct SourceClip {
  AudioBuffer audio;
  std::string utterance_id;
  std::string singer_id;
  std::string song_id;
};

MixtureExample make_unison(const SourceClip& x, const MixPolicy& policy, Rng& rng);
MixtureExample make_duet(const SourceClip& a, const SourceClip& b, const MixPolicy& policy, Rng& rng);
MixtureExample make_main_vs_rest(const SourceClip& main, std::span<const SourceClip> rest,
                                 const MixPolicy& policy, Rng& rng);

// Convenience overloads for anonymous audio.
MixtureExample make_unison(const AudioBuffer& x, const MixPolicy& policy, Rng& rng);
MixtureExample make_duet(const AudioBuffer& a, const AudioBuffer& b, const MixPolicy& policy, Rng& rng);
MixtureExample make_main_vs_rest(const AudioBuffer& main, std::span<const AudioBuffer> rest,
                                 const MixPolicy& policy, Rng& rng);

}  // namespace medleysep

#endif  // MEDLEYSEP_MIXER_MIXTURE_H_
