// include/medleysep/mixer/pair_sampler.h

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

#ifndef MEDLEYSEP_MIXER_PAIR_SAMPLER_H_
#define MEDLEYSEP_MIXER_PAIR_SAMPLER_H_

#include <atomic>
#include <cstddef>
#include <string>
#include <vector>

#include "medleysep/common/random.h"
#include "medleysep/corpus/manifest.h"
#include "medleysep/mixer/mix_policy.h"
#include "medleysep/mixer/mixture.h"

namespace medleysep {

struct PairDraw {
  std::size_t first = 0;
  std::size_t second = 0;
  PairKind kind = PairKind::kIndependent;
};

// Draws correlated utterance pairs and groups from a manifest. Only records
// at least one chunk long are eligible. Read-only after construction.
class PairSampler {
 public:
  PairSampler(const Manifest& manifest, const MixPolicy& policy);

  // With p_same_singer: two utterances of one singer. Otherwise with
  // p_same_song: one song by two different singers. Otherwise two
  // independent draws, from the speech pool with p_speech. A requested
  // group with fewer than two members falls back to independent draws.
  PairDraw sample_pair(Rng& rng) const;

  // One record (speech with p_speech).
  std::size_t sample_single(Rng& rng) const;

  // `count` distinct records; the first two come from sample_pair and later
  // ones keep the pair's relation when the group allows it.
  std::vector<std::size_t> sample_group(std::size_t count, Rng& rng, PairKind* kind = nullptr) const;

  std::size_t fallback_count() const { return fallbacks_.load(); }
  std::size_t eligible_count() const { return singing_.size() + speech_.size(); }

 private:
  std::size_t draw_from_pool(const std::vector<std::size_t>& pool, Rng& rng) const;
  const std::vector<std::size_t>& pick_domain_pool(Rng& rng) const;
  PairDraw independent(Rng& rng) const;

  const Manifest& manifest_;
  MixPolicy policy_;
  std::vector<std::size_t> singing_, speech_;
  // Groups with at least two eligible members.
  std::vector<std::vector<std::size_t>> singer_groups_;
  std::vector<std::vector<std::size_t>> song_groups_;  // >= 2 distinct singers
  mutable std::atomic<std::size_t> fallbacks_{0};
};

// One-shot helper: builds the sampler and draws a pair of records.
std::pair<SourceRecord, SourceRecord> sample_pair(const Manifest& manifest, const MixPolicy& policy,
                                                  Rng& rng);

}  // namespace medleysep

#endif  // MEDLEYSEP_MIXER_PAIR_SAMPLER_H_
