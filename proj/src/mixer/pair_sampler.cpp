// src/mixer/pair_sampler.cpp

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

#include "medleysep/mixer/pair_sampler.h"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace medleysep {
namespace {

// Two distinct members of a group.
std::pair<std::size_t, std::size_t> two_of(const std::vector<std::size_t>& group, Rng& rng) {
  const auto i = uniform_int<std::size_t>(rng, 0, group.size() - 1);
  auto j = uniform_int<std::size_t>(rng, 0, group.size() - 2);
  if (j >= i) ++j;
  return {group[i], group[j]};
}

}  // namespace

PairSampler::PairSampler(const Manifest& manifest, const MixPolicy& policy)
    : manifest_(manifest), policy_(policy) {
  policy_.validate();
  std::vector<bool> eligible(manifest.size(), false);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& r = manifest.records()[i];
    if (r.duration + 1e-9 < policy_.chunk_seconds) continue;
    eligible[i] = true;
    (r.domain == Domain::kSinging ? singing_ : speech_).push_back(i);
  }
  for (const auto& [singer, idx] : manifest.singer_index()) {
    std::vector<std::size_t> g;
    for (auto i : idx)
      if (eligible[i]) g.push_back(i);
    if (g.size() >= 2) singer_groups_.push_back(std::move(g));
  }
  for (const auto& [song, idx] : manifest.song_index()) {
    std::vector<std::size_t> g;
    std::set<std::string> singers;
    for (auto i : idx) {
      if (!eligible[i]) continue;
      g.push_back(i);
      singers.insert(manifest.records()[i].singer_id);
    }
    if (singers.size() >= 2) song_groups_.push_back(std::move(g));
  }
  if (eligible_count() < 2 && !(policy_.category == Category::kUnison && eligible_count() == 1))
    throw std::invalid_argument("PairSampler: fewer than two records are at least one chunk long");
}

std::size_t PairSampler::draw_from_pool(const std::vector<std::size_t>& pool, Rng& rng) const {
  const auto& weights = manifest_.corpus_weights();
  bool weighted = false;
  for (double w : weights) weighted = weighted || w != weights.front();
  if (!weighted) return pool[uniform_int<std::size_t>(rng, 0, pool.size() - 1)];

  // Pick a corpus by weight among those present in the pool, then a record.
  std::vector<std::vector<std::size_t>> by_corpus(weights.size());
  for (auto i : pool) by_corpus[manifest_.records()[i].corpus].push_back(i);
  std::vector<double> w(weights.size(), 0.0);
  for (std::size_t c = 0; c < weights.size(); ++c) w[c] = by_corpus[c].empty() ? 0.0 : weights[c];
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  const auto& chosen = by_corpus[pick(rng)];
  return chosen[uniform_int<std::size_t>(rng, 0, chosen.size() - 1)];
}

const std::vector<std::size_t>& PairSampler::pick_domain_pool(Rng& rng) const {
  const bool want_speech = bernoulli(rng, policy_.p_speech);
  if (want_speech && speech_.size() >= 2) return speech_;
  if (singing_.size() >= 2 || speech_.size() < 2) return singing_.size() > 0 ? singing_ : speech_;
  return speech_;
}

PairDraw PairSampler::independent(Rng& rng) const {
  const auto& pool = pick_domain_pool(rng);
  if (pool.size() < 2) throw std::invalid_argument("PairSampler: pool has fewer than two records");
  const std::size_t a = draw_from_pool(pool, rng);
  std::size_t b = a;
  while (b == a) b = draw_from_pool(pool, rng);
  return {a, b, PairKind::kIndependent};
}

PairDraw PairSampler::sample_pair(Rng& rng) const {
  if (bernoulli(rng, policy_.p_same_singer)) {
    if (!singer_groups_.empty()) {
      const auto& g = singer_groups_[uniform_int<std::size_t>(rng, 0, singer_groups_.size() - 1)];
      auto [a, b] = two_of(g, rng);
      return {a, b, PairKind::kSameSinger};
    }
    ++fallbacks_;
    spdlog::debug("pair sampler: no singer with two eligible utterances, drawing independently");
  } else if (bernoulli(rng, policy_.p_same_song)) {
    if (!song_groups_.empty()) {
      const auto& g = song_groups_[uniform_int<std::size_t>(rng, 0, song_groups_.size() - 1)];
      const auto a = g[uniform_int<std::size_t>(rng, 0, g.size() - 1)];
      std::vector<std::size_t> others;
      for (auto i : g)
        if (manifest_.records()[i].singer_id != manifest_.records()[a].singer_id) others.push_back(i);
      const auto b = others[uniform_int<std::size_t>(rng, 0, others.size() - 1)];
      return {a, b, PairKind::kSameSong};
    }
    ++fallbacks_;
    spdlog::debug("pair sampler: no song sung by two eligible singers, drawing independently");
  }
  return independent(rng);
}

std::size_t PairSampler::sample_single(Rng& rng) const {
  const bool want_speech = bernoulli(rng, policy_.p_speech);
  const auto& pool = (want_speech && !speech_.empty()) || singing_.empty() ? speech_ : singing_;
  return draw_from_pool(pool, rng);
}

std::vector<std::size_t> PairSampler::sample_group(std::size_t count, Rng& rng, PairKind* kind) const {
  if (count == 0) return {};
  if (count == 1) return {sample_single(rng)};
  const auto pair = sample_pair(rng);
  if (kind) *kind = pair.kind;
  std::vector<std::size_t> out{pair.first, pair.second};
  const auto& first = manifest_.records()[pair.first];

  std::vector<std::size_t> candidates;
  if (pair.kind == PairKind::kSameSinger) {
    for (auto i : manifest_.singer_index().at(first.singer_id)) candidates.push_back(i);
  } else if (pair.kind == PairKind::kSameSong) {
    for (auto i : manifest_.song_index().at(first.song_id)) candidates.push_back(i);
  }
  std::set<std::size_t> eligible_domain;
  for (auto i : (first.domain == Domain::kSinging ? singing_ : speech_)) eligible_domain.insert(i);

  auto unused = [&](std::size_t i) { return std::find(out.begin(), out.end(), i) == out.end(); };
  while (out.size() < count) {
    std::vector<std::size_t> open;
    for (auto i : candidates)
      if (unused(i) && eligible_domain.count(i)) open.push_back(i);
    if (open.empty())
      for (auto i : eligible_domain)
        if (unused(i)) open.push_back(i);
    if (open.empty()) throw std::invalid_argument("PairSampler: not enough records for the requested group");
    out.push_back(open[uniform_int<std::size_t>(rng, 0, open.size() - 1)]);
  }
  return out;
}

std::pair<SourceRecord, SourceRecord> sample_pair(const Manifest& manifest, const MixPolicy& policy,
                                                  Rng& rng) {
  PairSampler sampler(manifest, policy);
  const auto d = sampler.sample_pair(rng);
  return {manifest.records()[d.first], manifest.records()[d.second]};
}

}  // namespace medleysep
