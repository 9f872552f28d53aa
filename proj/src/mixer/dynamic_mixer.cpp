// src/mixer/dynamic_mixer.cpp

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

#include "medleysep/mixer/dynamic_mixer.h"

#include <spdlog/spdlog.h>

#include "medleysep/audio/resample.h"
#include "medleysep/audio/wav.h"

namespace medleysep {
namespace {

constexpr int kDrawRetries = 10;

}  // namespace

const AudioBuffer& AudioCache::get(const SourceRecord& record) {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(record.utterance_id);
  if (it != entries_.end()) return *it->second;
  auto audio = resample(read_wav(record.resolved_path), sample_rate_);
  auto [pos, _] = entries_.emplace(record.utterance_id, std::make_unique<AudioBuffer>(std::move(audio)));
  return *pos->second;
}

DynamicMixer::DynamicMixer(const Manifest& manifest, MixPolicy policy, int sample_rate,
                           std::shared_ptr<AudioCache> cache)
    : manifest_(manifest),
      policy_(std::move(policy)),
      sample_rate_(sample_rate),
      sampler_(manifest, policy_),
      cache_(cache ? std::move(cache) : std::make_shared<AudioCache>(sample_rate)) {
  if (!is_pipeline_rate(sample_rate))
    throw std::invalid_argument("DynamicMixer: unsupported pipeline sample rate " + std::to_string(sample_rate));
  if (cache_->sample_rate() != sample_rate) throw std::invalid_argument("DynamicMixer: cache rate mismatch");
}

SourceClip DynamicMixer::clip(std::size_t index) const {
  const auto& r = manifest_.records()[index];
  const auto& audio = cache_->get(r);
  const auto need = static_cast<std::size_t>(std::lround(policy_.chunk_seconds * sample_rate_));
  // Manifest durations can round; pad rather than reject a marginally short file.
  SourceClip c{audio.size() >= need ? audio : audio.slice(0, need), r.utterance_id, r.singer_id, r.song_id};
  return c;
}

MixtureExample DynamicMixer::draw(Rng& rng) const {
  for (int attempt = 0;; ++attempt) {
    try {
      switch (policy_.category) {
        case Category::kUnison: {
          auto ex = make_unison(clip(sampler_.sample_single(rng)), policy_, rng);
          return ex;
        }
        case Category::kDuet: {
          const auto d = sampler_.sample_pair(rng);
          auto ex = make_duet(clip(d.first), clip(d.second), policy_, rng);
          ex.pair_kind = d.kind;
          return ex;
        }
        case Category::kMainVsRest: {
          const auto n_rest = uniform_int<int>(rng, policy_.n_rest_range[0], policy_.n_rest_range[1]);
          PairKind kind = PairKind::kIndependent;
          const auto group = sampler_.sample_group(static_cast<std::size_t>(n_rest) + 1, rng, &kind);
          std::vector<SourceClip> rest;
          for (std::size_t i = 1; i < group.size(); ++i) rest.push_back(clip(group[i]));
          auto ex = make_main_vs_rest(clip(group[0]), rest, policy_, rng);
          ex.pair_kind = kind;
          return ex;
        }
        case Category::kNSinging: break;
      }
      throw std::invalid_argument("DynamicMixer: unsupported category");
    } catch (const SilentSourceError& e) {
      if (attempt + 1 >= kDrawRetries) throw;
      spdlog::debug("dynamic mixer: {}; redrawing", e.what());
    }
  }
}

}  // namespace medleysep
