// include/medleysep/mixer/dynamic_mixer.h

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

#ifndef MEDLEYSEP_MIXER_DYNAMIC_MIXER_H_
#define MEDLEYSEP_MIXER_DYNAMIC_MIXER_H_

#include <map>
#include <memory>
#include <mutex>

#include "medleysep/corpus/manifest.h"
#include "medleysep/mixer/mix_policy.h"
#include "medleysep/mixer/mixture.h"
#include "medleysep/mixer/pair_sampler.h"

namespace medleysep {

// Loads manifest audio on demand (resampled to the pipeline rate, mono) and
// keeps it for reuse. Safe for concurrent readers.
class AudioCache {
 public:
  explicit AudioCache(int sample_rate) : sample_rate_(sample_rate) {}
  const AudioBuffer& get(const SourceRecord& record);
  int sample_rate() const { return sample_rate_; }

 private:
  int sample_rate_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<AudioBuffer>> entries_;
};

// Draws fresh training mixtures for one category from a manifest.
class DynamicMixer {
 public:
  DynamicMixer(const Manifest& manifest, MixPolicy policy, int sample_rate,
               std::shared_ptr<AudioCache> cache = nullptr);

  MixtureExample draw(Rng& rng) const;

  const MixPolicy& policy() const { return policy_; }
  const PairSampler& sampler() const { return sampler_; }
  int sample_rate() const { return sample_rate_; }

 private:
  SourceClip clip(std::size_t index) const;

  const Manifest& manifest_;
  MixPolicy policy_;
  int sample_rate_;
  PairSampler sampler_;
  std::shared_ptr<AudioCache> cache_;
};

}  // namespace medleysep

#endif  // MEDLEYSEP_MIXER_DYNAMIC_MIXER_H_
