// src/mixer/mixture.cpp

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

#include "medleysep/mixer/mixture.h"

#include <algorithm>
#include <cmath>

#include "medleysep/audio/loudness.h"
#include "medleysep/mixer/voice_transforms.h"

namespace medleysep {
namespace {

constexpr double kPeakLimit = 0.99;
constexpr int kSilenceRetries = 10;

std::size_t chunk_samples(const MixPolicy& policy, int sample_rate) {
  return static_cast<std::size_t>(std::lround(policy.chunk_seconds * sample_rate));
}

double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

struct Chunk {
  AudioBuffer audio;
  double offset_seconds;
};

// Random window of `length` samples, normalised to the policy RMS level.
Chunk draw_chunk(const AudioBuffer& x, std::size_t length, const MixPolicy& policy, Rng& rng,
                 bool require_voiced = false) {
  if (x.size() < length)
    throw std::invalid_argument("mixture: source shorter than the requested chunk");
  const std::size_t span = x.size() - length;
  for (int attempt = 0;; ++attempt) {
    const std::size_t offset = span == 0 ? 0 : uniform_int<std::size_t>(rng, 0, span);
    auto chunk = x.slice(offset, length);
    const double level = loudness_db(chunk);
    if (require_voiced && level < kSilenceThresholdDb) {
      if (attempt + 1 >= kSilenceRetries)
        throw SilentSourceError("main source chunk below -60 dB after repeated draws");
      continue;
    }
    const double g = gain_to_loudness(chunk.samples(), policy.normalize_db);
    return {chunk.scaled(g), static_cast<double>(offset) / x.sample_rate()};
  }
}

SourceProvenance provenance_of(const SourceClip& c, double offset, double gain_db) {
  SourceProvenance p;
  p.utterance_id = c.utterance_id;
  p.singer_id = c.singer_id;
  p.song_id = c.song_id;
  p.offset_seconds = offset;
  p.gain_db = gain_db;
  return p;
}

// Scales every source down when the mixture would exceed the peak limit,
// then rebuilds the mixture as the exact two-term sum.
AudioBuffer finish(std::vector<AudioBuffer>& sources) {
  auto mixture = sum_buffers(sources);
  if (const double peak = mixture.peak(); peak > kPeakLimit) {
    const double g = kPeakLimit / peak;
    for (auto& s : sources) s = s.scaled(g);
    mixture = sum_buffers(sources);
  }
  return mixture;
}

SourceClip anonymous(const AudioBuffer& a) { return SourceClip{a, "", "", ""}; }

}  // namespace

std::string to_string(PairKind k) {
  switch (k) {
    case PairKind::kIndependent: return "independent";
    case PairKind::kSameSinger: return "same_singer";
    case PairKind::kSameSong: return "same_song";
    case PairKind::kSelf: return "self";
  }
  return "independent";
}

MixtureExample make_unison(const SourceClip& x, const MixPolicy& policy, Rng& rng) {
  policy.validate();
  const auto length = chunk_samples(policy, x.audio.sample_rate());
  auto chunk = draw_chunk(x.audio, length, policy, rng);

  const double octave =
      policy.octave_choices[uniform_int<std::size_t>(rng, 0, policy.octave_choices.size() - 1)];
  const double detune = uniform(rng, policy.detune_cents_range[0], policy.detune_cents_range[1]);
  const double ratio = uniform(rng, policy.formant_ratio_range[0], policy.formant_ratio_range[1]);
  const double g1 = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);
  const double g2 = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);

  auto copy = formant_shift(pitch_shift(chunk.audio, octave + detune), ratio);
  std::vector<AudioBuffer> sources{chunk.audio.scaled(db_to_gain(g1)), copy.scaled(db_to_gain(g2))};
  auto mixture = finish(sources);

  MixtureExample ex{std::move(mixture), std::move(sources), Category::kUnison, PairKind::kSelf, {}};
  ex.provenance.push_back(provenance_of(x, chunk.offset_seconds, g1));
  auto shifted = provenance_of(x, chunk.offset_seconds, g2);
  shifted.octave_cents = octave;
  shifted.detune_cents = detune;
  shifted.formant_ratio = ratio;
  shifted.transformed = true;
  ex.provenance.push_back(shifted);
  return ex;
}

MixtureExample make_duet(const SourceClip& a, const SourceClip& b, const MixPolicy& policy, Rng& rng) {
  policy.validate();
  if (a.audio.sample_rate() != b.audio.sample_rate())
    throw std::invalid_argument("make_duet: sample rates differ");
  const auto length =
      std::min({chunk_samples(policy, a.audio.sample_rate()), a.audio.size(), b.audio.size()});
  auto ca = draw_chunk(a.audio, length, policy, rng);
  auto cb = draw_chunk(b.audio, length, policy, rng);
  const double ga = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);
  const double gb = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);
  std::vector<AudioBuffer> sources{ca.audio.scaled(db_to_gain(ga)), cb.audio.scaled(db_to_gain(gb))};
  auto mixture = finish(sources);
  MixtureExample ex{std::move(mixture), std::move(sources), Category::kDuet, PairKind::kIndependent, {}};
  ex.provenance = {provenance_of(a, ca.offset_seconds, ga), provenance_of(b, cb.offset_seconds, gb)};
  return ex;
}

MixtureExample make_main_vs_rest(const SourceClip& main, std::span<const SourceClip> rest,
                                 const MixPolicy& policy, Rng& rng) {
  policy.validate();
  if (rest.empty() || rest.size() > 3)
    throw std::invalid_argument("make_main_vs_rest: need 1 to 3 rest sources");
  const int rate = main.audio.sample_rate();
  std::size_t length = std::min(chunk_samples(policy, rate), main.audio.size());
  for (const auto& r : rest) {
    if (r.audio.sample_rate() != rate) throw std::invalid_argument("make_main_vs_rest: sample rates differ");
    length = std::min(length, r.audio.size());
  }

  auto main_chunk = draw_chunk(main.audio, length, policy, rng, /*require_voiced=*/true);
  MixtureExample ex{AudioBuffer::zeros(1, rate), {}, Category::kMainVsRest, PairKind::kIndependent, {}};
  ex.provenance.push_back(provenance_of(main, main_chunk.offset_seconds, 0.0));

  std::vector<double> rest_sum(length, 0.0);
  for (const auto& r : rest) {
    auto c = draw_chunk(r.audio, length, policy, rng);
    const double g = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);
    const double lin = db_to_gain(g);
    for (std::size_t i = 0; i < length; ++i) rest_sum[i] += c.audio[i] * lin;
    auto p = provenance_of(r, c.offset_seconds, g);
    p.in_rest = true;
    ex.provenance.push_back(p);
  }
  AudioBuffer rest_buf(std::move(rest_sum), rate);

  // Main gain: the drawn value, raised when needed to clear the margin.
  double main_db = uniform(rng, policy.gain_range_db[0], policy.gain_range_db[1]);
  const double needed = loudness_db(rest_buf) + policy.main_margin_db - loudness_db(main_chunk.audio);
  main_db = std::max(main_db, needed);
  std::vector<AudioBuffer> sources{main_chunk.audio.scaled(db_to_gain(main_db)), rest_buf};
  auto mixture = finish(sources);
  // Rounding in the rescale can leave the margin a hair short.
  while (loudness_db(sources[0]) < loudness_db(sources[1]) + policy.main_margin_db) {
    sources[0] = sources[0].scaled(1.0 + 1e-9);
    mixture = sum_buffers(sources);
  }
  ex.provenance[0].gain_db = main_db;
  ex.mixture = std::move(mixture);
  ex.sources = std::move(sources);
  return ex;
}

MixtureExample make_unison(const AudioBuffer& x, const MixPolicy& policy, Rng& rng) {
  return make_unison(anonymous(x), policy, rng);
}

MixtureExample make_duet(const AudioBuffer& a, const AudioBuffer& b, const MixPolicy& policy, Rng& rng) {
  return make_duet(anonymous(a), anonymous(b), policy, rng);
}

MixtureExample make_main_vs_rest(const AudioBuffer& main, std::span<const AudioBuffer> rest,
                                 const MixPolicy& policy, Rng& rng) {
  std::vector<SourceClip> clips;
  for (const auto& r : rest) clips.push_back(anonymous(r));
  return make_main_vs_rest(anonymous(main), clips, policy, rng);
}

}  // namespace medleysep
