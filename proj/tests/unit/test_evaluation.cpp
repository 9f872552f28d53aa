// tests/unit/test_evaluation.cpp

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
#include <fstream>

#include <Eigen/Dense>

#include "medleysep/audio/wav.h"
#include "medleysep/evaluation/evaluate.h"
#include "medleysep/evaluation/metrics.h"
#include "medleysep/objectives/losses.h"
#include "medleysep/oracle/masks.h"
#include "test_support.h"

using namespace medleysep;
using namespace medleysep::testing;

namespace {

constexpr int kRate = 16000;

std::vector<double> delayed(std::span<const double> x, std::size_t d) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t n = d; n < x.size(); ++n) out[n] = x[n - d];
  return out;
}

// Explicit least squares over the zero-padded delay matrix.
double direct_sdr(std::span<const double> est, std::span<const double> ref, std::size_t taps) {
  const std::size_t m = est.size() + taps - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, taps);
  for (std::size_t k = 0; k < taps; ++k)
    for (std::size_t n = 0; n < ref.size(); ++n) A(n + k, k) = ref[n];
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (std::size_t n = 0; n < est.size(); ++n) y[n] = est[n];
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd s = A * c;
  return 10.0 * std::log10(s.squaredNorm() / (y - s).squaredNorm());
}

MedleyVoxSegment segment(const std::string& id, Category c, int n_singings = 2, int n_singers = 2) {
  MedleyVoxSegment s;
  s.segment_id = id;
  s.song_id = "song";
  s.category = c;
  s.n_singings = n_singings;
  s.n_singers = n_singers;
  s.end = 1.0;
  s.mixture_path = id + "/mix.wav";
  for (int i = 0; i < n_singings; ++i) s.stem_paths.push_back(id + "/stem" + std::to_string(i) + ".wav");
  if (c == Category::kMainVsRest && n_singings > 2) s.main_index = 0;
  return s;
}

SeparateFn oracle(OracleKind kind) {
  StftConfig cfg;
  cfg.fft_size = cfg.win_size = 512;
  cfg.hop_size = 128;
  return [kind, cfg](const AudioBuffer& mix, std::span<const AudioBuffer> refs) {
    return oracle_separate(kind, refs, mix, cfg);
  };
}

SeparateFn scaled_truth(double gain, bool swap = false) {
  return [gain, swap](const AudioBuffer&, std::span<const AudioBuffer> refs) {
    std::vector<AudioBuffer> out;
    for (const auto& r : refs) out.push_back(r.scaled(gain));
    if (swap) std::swap(out[0], out[1]);
    return out;
  };
}

std::vector<AudioBuffer> duet(std::uint64_t seed, std::size_t len = 8000) {
  return {voice_like(seed, len, kRate), voice_like(seed + 3, len, kRate)};
}

}  // namespace

TEST_CASE("bss_sdr: matches an explicit least-squares projection") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto ref = white_noise(300, 10 + seed);
    auto est = delayed(ref, 3);
    const auto noise = white_noise(300, 20 + seed, 0.3);
    for (std::size_t n = 0; n < est.size(); ++n) est[n] += noise[n];
    const auto got = bss_sdr(est, {ref}, 0, 16);
    CHECK(got.value == doctest::Approx(direct_sdr(est, ref, 16)).epsilon(1e-8));
    CHECK(got.taps == 16);
    CHECK_FALSE(got.regularized);
  }
}

TEST_CASE("bss_sdr: identity, delay and wrong-source cases") {
  const auto a = white_noise(16000, 1);
  const auto b = white_noise(16000, 2);
  const std::vector<std::vector<double>> refs{a, b};
  CHECK(bss_sdr(a, refs, 0).value > 100.0);
  // A delay moves the last samples out of the segment; with a silent tail
  // nothing is lost, and on a long segment the loss stays below -40 dB.
  auto tailed = a;
  std::fill(tailed.end() - 10, tailed.end(), 0.0);
  CHECK(bss_sdr(delayed(tailed, 10), {tailed, b}, 0).value > 100.0);
  const auto long_ref = white_noise(160000, 3);
  CHECK(bss_sdr(delayed(long_ref, 10), {long_ref}, 0).value > 40.0);
  CHECK(bss_sdr(b, refs, 0).value < -10.0);
}

TEST_CASE("bss_sdr: insensitive to delays shorter than the filter") {
  // Silent tails keep every delayed copy inside the segment.
  auto ref = voice_like(3, 16000, kRate).vec();
  std::fill(ref.end() - 400, ref.end(), 0.0);
  auto est = ref;
  const auto noise = white_noise(15600, 4, 0.05);
  for (std::size_t n = 0; n < noise.size(); ++n) est[n] += noise[n];
  const double base = bss_sdr(est, {ref}, 0).value;
  for (std::size_t d : {1, 50, 300}) CHECK(std::abs(bss_sdr(delayed(est, d), {ref}, 0).value - base) < 0.1);
}

TEST_CASE("bss_sdr: rank-deficient reference is regularized and flagged") {
  const auto ref = sine(2.0, kRate, 4000);
  const auto r = bss_sdr(ref, {ref}, 0, 64);
  CHECK(r.regularized);
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 60.0);
}

TEST_CASE("bss_sdr: short segments use their own length and bad input throws") {
  const auto ref = white_noise(100, 5);
  CHECK(bss_sdr(ref, {ref}, 0).taps == 100);
  CHECK_THROWS_AS(bss_sdr(ref, {ref}, 1), std::invalid_argument);
  CHECK_THROWS_AS(bss_sdr(white_noise(99, 6), {ref}, 0), std::invalid_argument);
  CHECK_THROWS_AS(bss_sdr(ref, {std::vector<double>(100, 0.0)}, 0), std::invalid_argument);
}

TEST_CASE("improvement: mixture scores zero, truth scores cap minus mixture") {
  const auto stems = duet(7);
  const auto mix = sum_buffers(stems);
  const std::vector<std::vector<double>> refs{stems[0].vec(), stems[1].vec()};
  for (auto m : {Metric::kSdr, Metric::kSiSdr})
    for (std::size_t i = 0; i < 2; ++i) CHECK(improvement(m, mix.samples(), refs, mix.samples(), i) == 0.0);
  CHECK(improvement(Metric::kSiSdr, refs[0], refs, mix.samples(), 0) ==
        doctest::Approx(kSiSdrCapDb - si_sdr(mix.samples(), refs[0])));
  CHECK(to_string(Metric::kSdr) == "sdr");
}

TEST_CASE("si_sdr is invariant to estimate gain") {
  const auto stems = duet(8);
  const auto est = sum_buffers(stems).vec();
  const double base = si_sdr(est, stems[0].samples());
  for (double g : {0.1, 10.0}) {
    auto scaled = est;
    for (auto& v : scaled) v *= g;
    CHECK(std::abs(si_sdr(scaled, stems[0].samples()) - base) < 1e-4);
  }
}

TEST_CASE("best permutation agrees with brute force over both orders") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto stems = duet(30 + seed, 2000);
    const std::vector<std::vector<double>> refs{stems[0].vec(), stems[1].vec()};
    auto e0 = refs[0], e1 = refs[1];
    const auto n0 = white_noise(2000, 100 + seed, 0.2), n1 = white_noise(2000, 200 + seed, 0.2);
    for (std::size_t n = 0; n < 2000; ++n) {
      e0[n] = 0.6 * e0[n] + 0.4 * refs[1][n] + n0[n];
      e1[n] = 0.5 * e1[n] + 0.5 * refs[0][n] + n1[n];
    }
    const std::vector<std::vector<double>> ests{e0, e1};
    const double keep = si_sdr(e0, refs[0]) + si_sdr(e1, refs[1]);
    const double swap = si_sdr(e1, refs[0]) + si_sdr(e0, refs[1]);
    const std::vector<std::size_t> expected = swap > keep ? std::vector<std::size_t>{1, 0}
                                                          : std::vector<std::size_t>{0, 1};
    CHECK(best_si_sdr_permutation(ests, refs) == expected);
  }
}

TEST_CASE("evaluate: oracle ladder on synthetic duets") {
  std::vector<MedleyVoxSegment> segs;
  std::vector<std::vector<AudioBuffer>> stems;
  for (int i = 0; i < 4; ++i) {
    segs.push_back(segment("d" + std::to_string(i), Category::kDuet));
    stems.push_back(duet(40 + i));
  }
  EvalOptions opts;
  const auto ibm = evaluate_in_memory(oracle(OracleKind::kIbm), segs, stems, opts);
  const auto irm = evaluate_in_memory(oracle(OracleKind::kIrm), segs, stems, opts);
  const auto cirm = evaluate_in_memory(oracle(OracleKind::kCirm), segs, stems, opts);
  REQUIRE(ibm.records.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (double v : ibm.records[i].si_sdr_i) CHECK(v > 0.0);
    for (double v : ibm.records[i].sdr_i) CHECK(v > 0.0);
    CHECK(cirm.records[i].mean_si_sdr_i() >= irm.records[i].mean_si_sdr_i());
    CHECK(cirm.records[i].mean_si_sdr_i() >= ibm.records[i].mean_si_sdr_i());
  }
  CHECK(cirm.summary.per_category.at({false, Category::kDuet}).mean_si_sdr_i >= 50.0);
}

TEST_CASE("evaluate: permutation handling per category") {
  const auto stems = duet(50);
  std::vector<MedleyVoxSegment> segs{segment("d", Category::kDuet), segment("m", Category::kMainVsRest)};
  EvalOptions opts;
  opts.compute_sdr = false;
  const auto res = evaluate_in_memory(scaled_truth(1.0, true), segs, {stems, stems}, opts);
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].permutation_used == std::vector<std::size_t>{1, 0});
  CHECK(res.records[0].mean_si_sdr_i() > 100.0);
  CHECK(res.records[1].permutation_used == std::vector<std::size_t>{0, 1});
  CHECK(res.records[1].mean_si_sdr_i() < 0.0);
  CHECK(res.records[0].sdr_i.empty());
  CHECK_FALSE(res.summary.has_sdr);

  opts.permutation_mode = PermutationMode::kBest;
  CHECK(evaluate_in_memory(scaled_truth(1.0, true), segs, {stems, stems}, opts).records[1].mean_si_sdr_i() > 100.0);
}

TEST_CASE("evaluate: main_vs_rest with all singings listed") {
  auto seg = segment("m3", Category::kMainVsRest, 3, 3);
  seg.main_index = 1;
  const std::vector<AudioBuffer> stems{voice_like(1, 4000, kRate), voice_like(2, 4000, kRate),
                                       voice_like(4, 4000, kRate)};
  const auto refs = evaluation_references(seg, stems);
  REQUIRE(refs.size() == 2);
  CHECK(max_abs_diff(refs[0].samples(), stems[1].samples()) == 0.0);
  for (std::size_t n = 0; n < 4000; ++n) REQUIRE(refs[1][n] == stems[0][n] + stems[2][n]);
}

TEST_CASE("evaluate: 16-bit save-load penalizes out-of-range estimates only") {
  std::vector<MedleyVoxSegment> segs;
  std::vector<std::vector<AudioBuffer>> stems;
  for (int i = 0; i < 3; ++i) {
    segs.push_back(segment("c" + std::to_string(i), Category::kDuet));
    auto st = duet(60 + i);
    const double peak = std::max(st[0].peak(), st[1].peak());
    for (auto& s : st) s = s.scaled(0.4 / peak);
    stems.push_back(st);
  }
  EvalOptions opts;
  opts.clipped_eval = true;
  opts.compute_sdr = false;
  auto drop = [&](double peak_target) {
    auto separate = [&](const AudioBuffer& mix, std::span<const AudioBuffer> refs) {
      // Imperfect but mixture-consistent estimates, then a gain to the peak.
      std::vector<AudioBuffer> est{AudioBuffer(refs[0].vec(), kRate), AudioBuffer(refs[1].vec(), kRate)};
      auto leak = est[1].scaled(0.1).vec();
      auto e0 = est[0].vec(), e1 = est[1].vec();
      for (std::size_t n = 0; n < e0.size(); ++n) {
        e0[n] = 0.9 * e0[n] + leak[n];
        e1[n] = mix[n] - e0[n];
      }
      est = {AudioBuffer(e0, kRate), AudioBuffer(e1, kRate)};
      const double g = peak_target / std::max(est[0].peak(), est[1].peak());
      return std::vector<AudioBuffer>{est[0].scaled(g), est[1].scaled(g)};
    };
    const auto res = evaluate_in_memory(separate, segs, stems, opts);
    const auto& s = res.summary.per_category;
    return s.at({false, Category::kDuet}).mean_si_sdr_i - s.at({true, Category::kDuet}).mean_si_sdr_i;
  };
  CHECK(drop(4.0) > 5.0);
  CHECK(std::abs(drop(0.9)) < 0.1);
}

TEST_CASE("evaluate: empty input and bad separators") {
  const auto empty = evaluate_in_memory(oracle(OracleKind::kIbm), {}, {}, {});
  CHECK(empty.records.empty());
  CHECK(empty.summary.zero_segments);
  CHECK(format_summary_table(empty.summary).find("no segments") != std::string::npos);

  auto one_output = [](const AudioBuffer& mix, std::span<const AudioBuffer>) { return std::vector<AudioBuffer>{mix}; };
  const auto res = evaluate_in_memory(one_output, {segment("x", Category::kDuet)}, {duet(1)}, {});
  CHECK(res.records.empty());
  REQUIRE(res.summary.skipped.size() == 1);
  CHECK(res.summary.skipped[0].reason.find("1 outputs for 2") != std::string::npos);
}

TEST_CASE("summary: mean and median per category and per cell") {
  std::vector<EvalRecord> rs(3);
  const double vals[] = {1.0, 2.0, 9.0};
  for (int i = 0; i < 3; ++i) {
    rs[i].category = i < 2 ? Category::kUnison : Category::kDuet;
    rs[i].n_singings = 2;
    rs[i].n_singers = i == 0 ? 1 : 2;
    rs[i].si_sdr_i = {vals[i] - 1.0, vals[i] + 1.0};
    rs[i].sdr_i = {vals[i], vals[i]};
  }
  rs.push_back(rs[0]);
  rs.back().si_sdr_i = {5.0, 5.0};
  const auto s = summarize(rs);
  const auto& u = s.per_category.at({false, Category::kUnison});
  CHECK(u.segments == 3);
  CHECK(u.mean_si_sdr_i == doctest::Approx(8.0 / 3.0));
  CHECK(u.median_si_sdr_i == doctest::Approx(2.0));
  CHECK(s.per_cell.at({false, Category::kUnison, 2, 1}).segments == 2);
  CHECK(s.per_cell.at({false, Category::kUnison, 2, 1}).median_si_sdr_i == doctest::Approx(3.0));
  CHECK(s.per_category.at({false, Category::kDuet}).mean_sdr_i == doctest::Approx(9.0));
  const auto j = to_json(s);
  CHECK(j["per_cell"].size() == 3);
  const auto line = to_json(rs[0]);
  for (const char* k : {"segment_id", "category", "n_singings", "n_singers", "sdr_i", "si_sdr_i", "permutation_used",
                        "clipped_eval"})
    CHECK(line.contains(k));
}

TEST_CASE("evaluate_dataset: reads WAVs, skips unreadable segments, worker-independent") {
  TempDir dir;
  std::vector<MedleyVoxSegment> segs;
  for (int i = 0; i < 3; ++i) {
    auto seg = segment("s" + std::to_string(i), i == 2 ? Category::kUnison : Category::kDuet);
    const auto stems = duet(80 + i);
    std::filesystem::create_directories(dir.path() / seg.segment_id);
    for (std::size_t k = 0; k < 2; ++k) write_wav(dir.path() / seg.stem_paths[k], stems[k], WavFormat::kFloat32);
    write_wav(dir.path() / seg.mixture_path, sum_buffers(stems), WavFormat::kFloat32);
    segs.push_back(seg);
  }
  std::filesystem::remove(dir.path() / segs[1].stem_paths[1]);
  EvalOptions opts;
  const auto one = evaluate_dataset(oracle(OracleKind::kIrm), segs, dir.path(), opts);
  opts.workers = 3;
  const auto three = evaluate_dataset(oracle(OracleKind::kIrm), segs, dir.path(), opts);
  REQUIRE(one.records.size() == 2);
  REQUIRE(one.summary.skipped.size() == 1);
  CHECK(one.summary.skipped[0].segment_id == "s1");
  REQUIRE(three.records.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(to_json(one.records[i]) == to_json(three.records[i]));
    CHECK(one.records[i].mean_si_sdr_i() > 5.0);
  }
  opts.resample = 24000;
  const auto up = evaluate_dataset(oracle(OracleKind::kIrm), segs, dir.path(), opts);
  CHECK(up.records.size() == 2);
}

TEST_CASE("permutation mode names") {
  CHECK(permutation_mode_from_string("pit") == PermutationMode::kBest);
  CHECK(to_string(PermutationMode::kFixed) == "fixed");
  CHECK_THROWS_AS(permutation_mode_from_string("nope"), std::invalid_argument);
}
