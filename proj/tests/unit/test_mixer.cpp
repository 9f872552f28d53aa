// tests/unit/test_mixer.cpp

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

#include <doctest.h>

#include <cmath>
#include <set>

#include "medleysep/audio/loudness.h"
#include "medleysep/audio/wav.h"
#include "medleysep/mixer/dynamic_mixer.h"
#include "medleysep/mixer/mixture.h"
#include "medleysep/mixer/pair_sampler.h"
#include "medleysep/mixer/voice_transforms.h"
#include "test_support.h"

using namespace medleysep;
using namespace medleysep::testing;

namespace {

constexpr int kRate = 16000;

AudioBuffer tone(double freq, double seconds, double amp = 0.3) {
  return AudioBuffer(sine(freq, kRate, static_cast<std::size_t>(seconds * kRate), amp), kRate);
}

// Harmonic series at f0 with amplitudes following a Gaussian formant bump.
std::vector<double> vowel(double f0, double formant_hz, std::size_t len) {
  std::vector<double> x(len, 0.0);
  for (int h = 1; h * f0 < kRate / 2 - 200; ++h) {
    const double f = h * f0;
    const double a = 0.05 + std::exp(-(f - formant_hz) * (f - formant_hz) / (2 * 300.0 * 300.0));
    const auto s = sine(f, kRate, len, 0.05 * a, 0.37 * h);
    for (std::size_t n = 0; n < len; ++n) x[n] += s[n];
  }
  return x;
}

// Envelope peak from harmonic amplitudes: parabola through the log-amplitude
// of the strongest harmonic and its neighbours.
double envelope_peak(std::span<const double> x, double f0) {
  std::vector<double> amp;
  for (int h = 1; h * f0 < 4000; ++h) amp.push_back(std::log(dtft_magnitude(x, h * f0, kRate)));
  std::size_t k = 1;
  for (std::size_t i = 1; i + 1 < amp.size(); ++i)
    if (amp[i] > amp[k]) k = i;
  const double a = amp[k - 1], b = amp[k], c = amp[k + 1];
  const double delta = 0.5 * (a - c) / (a - 2 * b + c);
  return (static_cast<double>(k) + 1 + delta) * f0;
}

MixPolicy plain_policy(Category c) {
  MixPolicy p;
  p.category = c;
  p.chunk_seconds = 1.0;
  return p;
}

void check_exact_sum(const MixtureExample& ex) {
  REQUIRE(ex.sources.size() == 2);
  REQUIRE(ex.sources[0].size() == ex.mixture.size());
  REQUIRE(ex.sources[1].size() == ex.mixture.size());
  for (std::size_t n = 0; n < ex.mixture.size(); ++n) {
    REQUIRE(std::isfinite(ex.mixture[n]));
    REQUIRE(ex.mixture[n] == ex.sources[0][n] + ex.sources[1][n]);
  }
}

SourceRecord record(const std::string& id, const std::string& singer, const std::string& song,
                    Domain d = Domain::kSinging, double dur = 2.0) {
  SourceRecord r;
  r.utterance_id = id;
  r.audio_path = id + ".wav";
  r.singer_id = singer;
  r.song_id = song;
  r.domain = d;
  r.duration = dur;
  return r;
}

}  // namespace

TEST_CASE("pitch_shift: zero cents is identity") {
  const auto x = AudioBuffer(vowel(140, 900, kRate), kRate);
  const auto y = pitch_shift(x, 0.0);
  CHECK(y.size() == x.size());
  CHECK(reference_si_sdr(y.samples(), x.samples()) > 30.0);
}

TEST_CASE("pitch_shift: octave up doubles a 220 Hz tone") {
  const auto x = tone(220, 1.0);
  const auto y = pitch_shift(x, 1200.0);
  CHECK(y.size() == x.size());
  const double f = dtft_peak(y.samples(), kRate, 300, 600, 0.1);
  CHECK(std::abs(f - 440.0) < 4.4);
}

TEST_CASE("pitch_shift: +20 cents on 220 Hz") {
  const auto x = tone(220, 1.0);
  const auto y = pitch_shift(x, 20.0);
  const double expected = 220.0 * std::pow(2.0, 20.0 / 1200.0);
  const double f = dtft_peak(y.samples(), kRate, 210, 235, 0.02);
  CHECK(std::abs(f - expected) < 0.5);
  CHECK(y.size() == x.size());
}

TEST_CASE("pitch_shift: octave down and precondition") {
  const auto x = tone(440, 1.0);
  const auto y = pitch_shift(x, -1200.0);
  CHECK(std::abs(dtft_peak(y.samples(), kRate, 150, 350, 0.1) - 220.0) < 2.2);
  CHECK_THROWS_AS(pitch_shift(x, 1221.0), std::invalid_argument);
}

TEST_CASE("formant_shift: unit ratio is identity") {
  const auto x = AudioBuffer(vowel(120, 1000, kRate), kRate);
  const auto y = formant_shift(x, 1.0);
  CHECK(y.size() == x.size());
  CHECK(reference_si_sdr(y.samples(), x.samples()) > 30.0);
}

TEST_CASE("formant_shift: envelope peak scales, f0 stays") {
  const std::size_t len = kRate;
  const auto x = AudioBuffer(vowel(100, 1000, len), kRate);
  const auto y = formant_shift(x, 1.2);
  REQUIRE(y.size() == x.size());
  const double before = envelope_peak(x.samples(), 100);
  const double after = envelope_peak(y.samples(), 100);
  CHECK(std::abs(before - 1000.0) < 50.0);
  CHECK(std::abs(after / before - 1.2) < 0.06);
  const double f0 = dtft_peak(y.samples(), kRate, 90, 110, 0.02);
  CHECK(std::abs(f0 - 100.0) < 1.0);
}

TEST_CASE("make_unison: identity transforms with equal gains") {
  auto p = plain_policy(Category::kUnison);
  p.octave_choices = {0.0};
  p.detune_cents_range = {0.0, 0.0};
  p.formant_ratio_range = {1.0, 1.0};
  p.gain_range_db = {-3.0, -3.0};
  const auto x = tone(300, 2.0);
  Rng rng = derive_rng(1, {0});
  const auto ex = make_unison(x, p, rng);
  check_exact_sum(ex);
  for (std::size_t n = 0; n < ex.mixture.size(); ++n) {
    REQUIRE(ex.sources[0][n] == ex.sources[1][n]);
    REQUIRE(ex.mixture[n] == 2.0 * ex.sources[0][n]);
  }
  CHECK(ex.pair_kind == PairKind::kSelf);
}

TEST_CASE("make_unison: octave draw doubles f0 of the second copy") {
  auto p = plain_policy(Category::kUnison);
  p.octave_choices = {1200.0};
  p.detune_cents_range = {0.0, 0.0};
  p.formant_ratio_range = {1.0, 1.0};
  const auto x = AudioBuffer(vowel(150, 800, 2 * kRate), kRate);
  Rng rng = derive_rng(2, {0});
  const auto ex = make_unison(x, p, rng);
  check_exact_sum(ex);
  const double f0a = dtft_peak(ex.sources[0].samples(), kRate, 140, 160, 0.05);
  const double f0b = dtft_peak(ex.sources[1].samples(), kRate, 280, 320, 0.05);
  CHECK(std::abs(f0b / f0a - 2.0) < 0.02);
  CHECK(ex.provenance.at(1).octave_cents == 1200.0);
}

TEST_CASE("make_unison: random draws keep the invariants") {
  const auto p = plain_policy(Category::kUnison);
  const auto x = AudioBuffer(vowel(180, 1100, 2 * kRate), kRate);
  for (int i = 0; i < 6; ++i) {
    Rng rng = derive_rng(3, {static_cast<std::uint64_t>(i)});
    const auto ex = make_unison(x, p, rng);
    check_exact_sum(ex);
    CHECK(ex.mixture.size() == static_cast<std::size_t>(kRate));
    const double detune = ex.provenance.at(1).detune_cents;
    CHECK(detune >= -20.0);
    CHECK(detune <= 20.0);
  }
}

TEST_CASE("make_duet: exact sum and loudness gap bounded by gain range") {
  auto p = plain_policy(Category::kDuet);
  const auto a = tone(220, 2.0, 0.5), b = tone(330, 1.5, 0.05);
  for (int i = 0; i < 20; ++i) {
    Rng rng = derive_rng(4, {static_cast<std::uint64_t>(i)});
    const auto ex = make_duet(a, b, p, rng);
    check_exact_sum(ex);
    const double gap = std::abs(loudness_db(ex.sources[0].samples()) - loudness_db(ex.sources[1].samples()));
    CHECK(gap <= p.gain_range_db[1] - p.gain_range_db[0] + 1e-9);
  }
}

TEST_CASE("make_duet: trims to the shorter input") {
  auto p = plain_policy(Category::kDuet);
  p.chunk_seconds = 3.0;
  Rng rng = derive_rng(5, {0});
  const auto ex = make_duet(tone(220, 2.0), tone(330, 1.25), p, rng);
  CHECK(ex.mixture.size() == static_cast<std::size_t>(1.25 * kRate));
  check_exact_sum(ex);
}

TEST_CASE("make_main_vs_rest: margin holds for one and three rest sources") {
  auto p = plain_policy(Category::kMainVsRest);
  p.main_margin_db = 3.0;
  const auto main = tone(200, 2.0, 0.01);
  const std::vector<AudioBuffer> one{tone(310, 2.0, 0.8)};
  const std::vector<AudioBuffer> three{tone(310, 2.0, 0.8), tone(415, 2.0, 0.8), tone(520, 2.0, 0.8)};
  for (int i = 0; i < 10; ++i) {
    for (const auto* rest : {&one, &three}) {
      Rng rng = derive_rng(6, {static_cast<std::uint64_t>(i), rest->size()});
      const auto ex = make_main_vs_rest(main, *rest, p, rng);
      check_exact_sum(ex);
      CHECK(loudness_db(ex.sources[0].samples()) - loudness_db(ex.sources[1].samples()) >= 3.0);
      CHECK(ex.provenance.size() == rest->size() + 1);
      CHECK(ex.mixture.peak() <= 1.0);
    }
  }
}

TEST_CASE("make_main_vs_rest: silent main is rejected") {
  const auto p = plain_policy(Category::kMainVsRest);
  const auto silent = AudioBuffer::zeros(2 * kRate, kRate);
  const std::vector<AudioBuffer> rest{tone(310, 2.0)};
  Rng rng = derive_rng(7, {0});
  CHECK_THROWS_AS(make_main_vs_rest(silent, rest, p, rng), SilentSourceError);
  CHECK_THROWS_AS(make_main_vs_rest(tone(200, 2.0), std::span<const AudioBuffer>{}, p, rng),
                  std::invalid_argument);
}

TEST_CASE("mixtures are deterministic in the seed") {
  const auto p = plain_policy(Category::kUnison);
  const auto x = AudioBuffer(vowel(150, 900, 2 * kRate), kRate);
  Rng r1 = derive_rng(11, {4}), r2 = derive_rng(11, {4}), r3 = derive_rng(12, {4});
  const auto a = make_unison(x, p, r1), b = make_unison(x, p, r2), c = make_unison(x, p, r3);
  CHECK(a.mixture.vec() == b.mixture.vec());
  CHECK(a.mixture.vec() != c.mixture.vec());
}

TEST_CASE("MixPolicy validation") {
  MixPolicy p;
  CHECK_NOTHROW(p.validate());
  p.p_speech = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MixPolicy{};
  p.n_rest_range = {1, 4};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MixPolicy{};
  p.detune_cents_range = {-30, 20};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MixPolicy{};
  p.category = Category::kNSinging;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("sample_pair: forced same singer") {
  const Manifest m({record("a1", "alice", "s1"), record("a2", "alice", "s2"), record("b1", "bob", "s1"),
                    record("c1", "carol", "s3")});
  MixPolicy p = plain_policy(Category::kDuet);
  p.p_same_singer = 1.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = derive_rng(20, {static_cast<std::uint64_t>(i)});
    const auto [x, y] = sample_pair(m, p, rng);
    CHECK(x.singer_id == "alice");
    CHECK(y.singer_id == "alice");
    CHECK(x.utterance_id != y.utterance_id);
  }
}

TEST_CASE("sample_pair: forced same song picks different singers") {
  const Manifest m({record("a1", "alice", "s1"), record("a2", "alice", "s2"), record("b1", "bob", "s1"),
                    record("c1", "carol", "s3")});
  MixPolicy p = plain_policy(Category::kDuet);
  p.p_same_singer = 0.0;
  p.p_same_song = 1.0;
  PairSampler sampler(m, p);
  for (int i = 0; i < 50; ++i) {
    Rng rng = derive_rng(21, {static_cast<std::uint64_t>(i)});
    const auto d = sampler.sample_pair(rng);
    CHECK(d.kind == PairKind::kSameSong);
    CHECK(m.records()[d.first].song_id == "s1");
    CHECK(m.records()[d.first].singer_id != m.records()[d.second].singer_id);
  }
}

TEST_CASE("sample_pair: missing group falls back to independent draws") {
  const Manifest m({record("a1", "alice", "s1"), record("b1", "bob", "s2"), record("c1", "carol", "s3")});
  MixPolicy p = plain_policy(Category::kDuet);
  p.p_same_singer = 1.0;
  PairSampler sampler(m, p);
  Rng rng = derive_rng(22, {0});
  const auto d = sampler.sample_pair(rng);
  CHECK(d.kind == PairKind::kIndependent);
  CHECK(d.first != d.second);
  CHECK(sampler.fallback_count() == 1);
}

TEST_CASE("sample_pair: unconstrained draws and speech pool") {
  std::vector<SourceRecord> recs;
  for (int i = 0; i < 6; ++i) recs.push_back(record("sing" + std::to_string(i), "v" + std::to_string(i), "s1"));
  for (int i = 0; i < 6; ++i)
    recs.push_back(record("talk" + std::to_string(i), "t" + std::to_string(i), "", Domain::kSpeech));
  const Manifest m(recs);
  MixPolicy p = plain_policy(Category::kDuet);
  p.p_same_singer = 0.0;
  p.p_same_song = 0.0;
  p.p_speech = 0.0;
  PairSampler sampler(m, p);
  std::set<std::size_t> seen;
  for (int i = 0; i < 400; ++i) {
    Rng rng = derive_rng(23, {static_cast<std::uint64_t>(i)});
    const auto d = sampler.sample_pair(rng);
    CHECK(d.kind == PairKind::kIndependent);
    CHECK(m.records()[d.first].domain == Domain::kSinging);
    CHECK(m.records()[d.second].domain == Domain::kSinging);
    seen.insert(d.first);
  }
  CHECK(seen.size() == 6);

  p.p_speech = 1.0;
  PairSampler talk(m, p);
  Rng rng = derive_rng(24, {0});
  const auto d = talk.sample_pair(rng);
  CHECK(m.records()[d.first].domain == Domain::kSpeech);
}

TEST_CASE("sample_pair: same-singer frequency matches the policy") {
  std::vector<SourceRecord> recs;
  for (int s = 0; s < 20; ++s)
    for (int u = 0; u < 3; ++u)
      recs.push_back(record("u" + std::to_string(s) + "_" + std::to_string(u), "singer" + std::to_string(s),
                            "song" + std::to_string(s * 3 + u)));
  const Manifest m(recs);
  MixPolicy p = plain_policy(Category::kDuet);
  p.p_same_singer = 0.1;
  p.p_same_song = 0.0;
  PairSampler sampler(m, p);
  int same = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Rng rng = derive_rng(25, {static_cast<std::uint64_t>(i)});
    const auto d = sampler.sample_pair(rng);
    if (m.records()[d.first].singer_id == m.records()[d.second].singer_id) ++same;
  }
  // Independent draws hit the same singer with probability 2/59.
  const double expected = 0.1 + 0.9 * (2.0 / 59.0);
  CHECK(std::abs(static_cast<double>(same) / draws - expected) < 0.02);
}

TEST_CASE("sample_pair: short records are not eligible") {
  const Manifest m({record("a", "x", "s", Domain::kSinging, 0.5), record("b", "y", "s", Domain::kSinging, 0.5)});
  CHECK_THROWS_AS(PairSampler(m, plain_policy(Category::kDuet)), std::invalid_argument);
}

TEST_CASE("DynamicMixer: distinct mixtures from a small corpus") {
  TempDir dir;
  std::vector<SourceRecord> recs;
  for (int i = 0; i < 5; ++i) {
    const auto path = dir.path() / ("v" + std::to_string(i) + ".wav");
    write_wav(path, AudioBuffer(vowel(110 + 23 * i, 700 + 150 * i, 2 * kRate), kRate), WavFormat::kFloat32);
    auto r = record("v" + std::to_string(i), "singer" + std::to_string(i % 3), "song" + std::to_string(i % 2));
    r.resolved_path = path;
    recs.push_back(r);
  }
  const Manifest m(recs);
  for (auto cat : {Category::kUnison, Category::kDuet, Category::kMainVsRest}) {
    const DynamicMixer mixer(m, plain_policy(cat), kRate);
    std::set<std::vector<double>> seen;
    for (int i = 0; i < 8; ++i) {
      Rng rng = derive_rng(30, {static_cast<std::uint64_t>(i)});
      const auto ex = mixer.draw(rng);
      check_exact_sum(ex);
      CHECK(ex.category == cat);
      seen.insert(ex.mixture.vec());
    }
    CHECK(seen.size() == 8);
  }
}
