// tests/acceptance/acceptance.cpp

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

// Acceptance report: one PASS/FAIL/SKIP line per criterion. Exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "medleysep/audio/wav.h"
#include "medleysep/corpus/medleyvox.h"
#include "medleysep/evaluation/evaluate.h"
#include "medleysep/nn/module.h"
#include "medleysep/objectives/losses.h"
#include "medleysep/oracle/masks.h"
#include "medleysep/separators/heuristic.h"
#include "medleysep/separators/isrnet.h"
#include "medleysep/trainer/trainer.h"
#include "test_support.h"

using namespace medleysep;
using namespace medleysep::testing;
namespace fs = std::filesystem;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

// Collects sub-check results into one outcome.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failed_ = true;
    if (!notes_.empty()) notes_ += "; ";
    notes_ += (ok ? "" : "FAILED ") + what;
  }
  Outcome outcome() const { return {failed_ ? Status::kFail : Status::kPass, notes_}; }

 private:
  bool failed_ = false;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

using Signal = std::vector<double>;

Signal random_signal(std::mt19937_64& gen, std::size_t len, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Signal x(len);
  for (auto& v : x) v = n(gen);
  return x;
}

// ---------------------------------------------------------------------------

Outcome mixture_consistency_invariant() {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<std::size_t> length(64, 4096);
  std::uniform_real_distribution<double> log_scale(-3.0, 1.0);
  double worst_sum = 0.0, worst_idem = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = length(gen);
    const auto mixture = random_signal(gen, len, std::pow(10.0, log_scale(gen)));
    std::vector<Signal> est;
    for (int k = count(gen); k > 0; --k) est.push_back(random_signal(gen, len, std::pow(10.0, log_scale(gen))));
    const auto once = mixture_consistency(est, mixture);
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      double s = 0.0;
      for (const auto& e : once) s += e[i];
      err = std::max(err, std::abs(s - mixture[i]));
      peak = std::max(peak, std::abs(mixture[i]));
    }
    worst_sum = std::max(worst_sum, err / peak);
    const auto twice = mixture_consistency(once, mixture);
    for (std::size_t k = 0; k < once.size(); ++k) worst_idem = std::max(worst_idem, max_abs_diff(once[k], twice[k]));
  }
  Checks c;
  c.expect(worst_sum < 1e-6, "max relative sum error " + fmt("%.2e", worst_sum));
  c.expect(worst_idem < 1e-7, "max reapplication change " + fmt("%.2e", worst_idem));
  return c.outcome();
}

// Central-difference check over every sample; relative l2 error.
double gradient_error(const std::function<double(const Signal&)>& value, const Signal& x, const Signal& analytic) {
  const double h = 1e-5;
  Signal probe(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = value(probe);
    probe[i] = x[i] - h;
    const double down = value(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2 * h);
    num += (fd - analytic[i]) * (fd - analytic[i]);
    den += fd * fd;
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Outcome loss_correctness() {
  Checks c;
  std::mt19937_64 gen(202);
  const auto ref = random_signal(gen, 1024, 1.0);
  auto est = ref;
  const auto noise = random_signal(gen, 1024, 0.5);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] = 0.7 * ref[i] + noise[i];

  double lo = 1e300, hi = -1e300;
  for (double g : {0.1, 1.0, 10.0}) {
    Signal s(est);
    for (auto& v : s) v *= g;
    lo = std::min(lo, si_sdr(s, ref));
    hi = std::max(hi, si_sdr(s, ref));
  }
  c.expect(hi - lo < 1e-4, "si_sdr gain drift " + fmt("%.1e", hi - lo) + " dB");

  Signal doubled(ref);
  for (auto& v : doubled) v *= 2.0;
  const double snr2 = snr(doubled, ref);
  c.expect(std::abs(snr2) <= 0.01, "snr(2ref, ref) " + fmt("%.5f", snr2) + " dB");

  // Noise orthogonal to ref with equal energy.
  auto n = random_signal(gen, 1024, 1.0);
  const double rr = std::inner_product(ref.begin(), ref.end(), ref.begin(), 0.0);
  const double proj = std::inner_product(n.begin(), n.end(), ref.begin(), 0.0) / rr;
  for (std::size_t i = 0; i < n.size(); ++i) n[i] -= proj * ref[i];
  const double nn = std::inner_product(n.begin(), n.end(), n.begin(), 0.0);
  Signal ortho(ref);
  for (std::size_t i = 0; i < n.size(); ++i) ortho[i] += n[i] * std::sqrt(rr / nn);
  const double si_o = si_sdr(ortho, ref), snr_o = snr(ortho, ref);
  c.expect(std::abs(si_o) <= 1e-3, "orthogonal si_sdr " + fmt("%.2e", si_o) + " dB");
  c.expect(std::abs(snr_o) <= 1e-3, "orthogonal snr " + fmt("%.5f", snr_o) + " dB");

  const auto res = default_loss_resolutions();
  double worst = 0.0;
  worst = std::max(worst, gradient_error([&](const Signal& e) { return si_sdr(e, ref); }, est, si_sdr_grad(est, ref).grad));
  worst = std::max(worst, gradient_error([&](const Signal& e) { return snr(e, ref); }, est, snr_grad(est, ref).grad));
  worst = std::max(worst, gradient_error([&](const Signal& e) { return multi_res_stft_loss(e, ref, res); }, est,
                                         multi_res_stft_loss_grad(est, ref, res).grad));
  worst = std::max(worst, gradient_error([&](const Signal& e) { return ri_stft_loss(e, ref, res); }, est,
                                         ri_stft_loss_grad(est, ref, res).grad));
  c.expect(worst < 1e-3, "worst gradient rel. error " + fmt("%.1e", worst));
  return c.outcome();
}

// Recursive enumeration of every assignment, independent of the library's
// permutation loop.
void enumerate(std::vector<std::size_t>& perm, std::vector<bool>& used, const std::function<void()>& visit) {
  if (perm.size() == used.size()) {
    visit();
    return;
  }
  for (std::size_t e = 0; e < used.size(); ++e) {
    if (used[e]) continue;
    used[e] = true;
    perm.push_back(e);
    enumerate(perm, used, visit);
    perm.pop_back();
    used[e] = false;
  }
}

Outcome pit_equivalence() {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> noise_level(0.1, 2.0);
  const auto loss = negative_snr_loss();
  int mismatches = 0, instances = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 200; ++trial, ++instances) {
      std::vector<Signal> refs, est;
      for (std::size_t k = 0; k < n; ++k) refs.push_back(random_signal(gen, 256, 1.0));
      for (std::size_t k = 0; k < n; ++k) {
        auto e = random_signal(gen, 256, noise_level(gen));
        const auto& r = refs[(k + trial) % n];
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += r[i];
        est.push_back(std::move(e));
      }
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> best_perm, perm;
      std::vector<bool> used(n, false);
      enumerate(perm, used, [&] {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) total += loss(est[perm[r]], refs[r], false).value;
        total /= static_cast<double>(n);
        if (total < best) {
          best = total;
          best_perm = perm;
        }
      });
      const auto pit = upit_loss(est, refs, loss);
      if (pit.loss != best || pit.permutation != best_perm) ++mismatches;
    }
  }
  Checks c;
  c.expect(mismatches == 0, std::to_string(instances - mismatches) + "/" + std::to_string(instances) +
                                " instances match brute force exactly (N = 2, 3, 4)");
  return c.outcome();
}

Outcome oracle_ladder() {
  constexpr int kRate = 16000;
  StftConfig cfg;
  cfg.fft_size = cfg.win_size = 512;
  cfg.hop_size = 128;
  std::mt19937_64 gen(404);
  double min_ibm = 1e300, min_irm = 1e300, min_cirm = 1e300, min_cirm_random = 1e300;
  int order_violations = 0;
  auto score = [&](OracleKind kind, const std::vector<AudioBuffer>& stems, const AudioBuffer& mix) {
    const auto est = oracle_separate(kind, stems, mix, cfg);
    double worst = 1e300;
    for (std::size_t s = 0; s < stems.size(); ++s)
      worst = std::min(worst, reference_si_sdr(est[s].samples(), stems[s].samples()));
    return worst;
  };
  std::uniform_int_distribution<int> low_bin(4, 60), gap(20, 80), width(2, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const int a0 = low_bin(gen), aw = width(gen);
    const int b0 = a0 + aw + gap(gen), bw = width(gen);
    const std::vector<AudioBuffer> stems{sine_cluster(a0, aw, 512, kRate, 8000, gen()),
                                         sine_cluster(b0, bw, 512, kRate, 8000, gen())};
    const auto mix = sum_buffers(stems);
    const double ibm = score(OracleKind::kIbm, stems, mix), irm = score(OracleKind::kIrm, stems, mix),
                 cirm = score(OracleKind::kCirm, stems, mix);
    min_ibm = std::min(min_ibm, ibm);
    min_irm = std::min(min_irm, irm);
    min_cirm = std::min(min_cirm, cirm);
    if (cirm < irm || cirm < ibm) ++order_violations;
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<AudioBuffer> stems{voice_like(gen(), 8000, kRate),
                                         AudioBuffer(white_noise(8000, gen(), 0.1), kRate)};
    const auto mix = sum_buffers(stems);
    const double ibm = score(OracleKind::kIbm, stems, mix), irm = score(OracleKind::kIrm, stems, mix),
                 cirm = score(OracleKind::kCirm, stems, mix);
    min_cirm_random = std::min(min_cirm_random, cirm);
    if (cirm < irm || cirm < ibm) ++order_violations;
  }
  Checks c;
  c.expect(min_ibm >= 30.0, "disjoint IBM min " + fmt("%.1f", min_ibm) + " dB");
  c.expect(min_irm >= 30.0, "disjoint IRM min " + fmt("%.1f", min_irm) + " dB");
  c.expect(min_cirm >= 50.0, "disjoint cIRM min " + fmt("%.1f", min_cirm) + " dB");
  c.expect(min_cirm_random >= 50.0, "random-mixture cIRM min " + fmt("%.1f", min_cirm_random) + " dB");
  c.expect(order_violations == 0, std::to_string(order_violations) + " ordering violations in 40 instances");
  return c.outcome();
}

Outcome clipping_regression() {
  constexpr int kRate = 16000;
  auto duets = toy_duets(4, 16000, kRate, 505);
  std::vector<MedleyVoxSegment> segs;
  std::vector<std::vector<AudioBuffer>> stems;
  for (std::size_t i = 0; i < duets.size(); ++i) {
    MedleyVoxSegment s;
    s.segment_id = "clip" + std::to_string(i);
    s.category = Category::kDuet;
    s.end = 1.0;
    s.mixture_path = "unused.wav";
    s.stem_paths = {"a.wav", "b.wav"};
    segs.push_back(s);
    auto st = duets[i].sources;
    const double peak = std::max(st[0].peak(), st[1].peak());
    for (auto& x : st) x = x.scaled(0.4 / peak);
    stems.push_back(st);
  }
  EvalOptions opts;
  opts.clipped_eval = true;
  opts.compute_sdr = false;
  auto drop = [&](double peak_target) {
    auto separate = [&](const AudioBuffer& mix, std::span<const AudioBuffer> refs) {
      // Imperfect, mixture-consistent estimates rescaled to the target peak.
      auto e0 = refs[0].vec(), e1 = refs[1].vec();
      for (std::size_t n = 0; n < e0.size(); ++n) {
        e0[n] = 0.9 * e0[n] + 0.1 * refs[1][n];
        e1[n] = mix[n] - e0[n];
      }
      const AudioBuffer a(e0, kRate), b(e1, kRate);
      const double g = peak_target / std::max(a.peak(), b.peak());
      return std::vector<AudioBuffer>{a.scaled(g), b.scaled(g)};
    };
    const auto res = evaluate_in_memory(separate, segs, stems, opts);
    const auto& s = res.summary.per_category;
    return s.at({false, Category::kDuet}).mean_si_sdr_i - s.at({true, Category::kDuet}).mean_si_sdr_i;
  };
  const double loud = drop(4.0), unit = drop(0.9);
  Checks c;
  c.expect(loud > 5.0, "peak 4.0 drop " + fmt("%.2f", loud) + " dB");
  c.expect(std::abs(unit) < 0.1, "unit-scale drop " + fmt("%.4f", unit) + " dB");
  return c.outcome();
}

Outcome isrnet_efficiency() {
  const ISRNet small(ISRNetConfig{}, 606);
  const SRNetStack big(SRNetStackConfig{}, 607);
  const auto s = nn::count_params(small), b = nn::count_params(big);
  const double ratio = static_cast<double>(b) / static_cast<double>(s);
  Checks c;
  c.expect(s >= 120000 && s <= 200000, "reference iSRNet " + std::to_string(s) + " parameters");
  c.expect(ratio >= 30.0, "SRNet-style stack " + std::to_string(b) + " parameters, ratio " + fmt("%.1f", ratio));
  return c.outcome();
}

Outcome heuristic_properties() {
  constexpr int kRate = 16000;
  constexpr std::size_t kFft = 64, kFrames = 6, kBoundary = 10;
  StftConfig cfg;
  cfg.fft_size = cfg.win_size = kFft;
  cfg.hop_size = kFft / 4;
  std::mt19937_64 gen(707);
  auto random_spec = [&](double scale) {
    std::normal_distribution<double> n(0.0, scale);
    ComplexSpectrogram s(kFrames, cfg, kRate);
    for (auto& v : s.data()) v = {n(gen), n(gen)};
    return s;
  };
  const std::size_t bins = kFft / 2 + 1;
  double worst_excess = -1e300, worst_route = 0.0;
  int negatives = 0, bad_silence = 0, leaks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto X = random_spec(1.0);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    auto E1 = random_spec(u(gen)), E2 = random_spec(u(gen));
    // Frame 0: only the first estimate is active. Frame 1: both silent.
    for (std::size_t f = 0; f < bins; ++f) {
      E2.at(0, f) = 0.0;
      E1.at(1, f) = E2.at(1, f) = 0.0;
    }
    const std::vector<ComplexSpectrogram> est{E1, E2};
    const auto H = heuristic_stft(X, est, kBoundary);
    // The weight is w / (w + eps), so "full" routing is exact up to eps / w.
    double w = 0.0;
    for (std::size_t f = 0; f < kBoundary; ++f) w += std::abs(E1.at(0, f));
    for (std::size_t t = 0; t < kFrames; ++t)
      for (std::size_t f = kBoundary; f < bins; ++f) {
        const double a = H[0].at(t, f), b = H[1].at(t, f), m = std::abs(X.at(t, f));
        if (a < 0.0 || b < 0.0) ++negatives;
        worst_excess = std::max(worst_excess, a + b - m);
        if (t == 0) {
          worst_route = std::max(worst_route, std::abs(a - m) / (m * kHeuristicEps / w));
          if (b != 0.0) ++leaks;
        }
        if (t == 1 && (!(a == 0.0) || !(b == 0.0))) ++bad_silence;
      }
  }
  Checks c;
  c.expect(worst_excess <= kHeuristicEps, "max (sum - |X|) " + fmt("%.2e", worst_excess));
  c.expect(negatives == 0, std::to_string(negatives) + " negative magnitudes");
  c.expect(worst_route <= 1.0 + 1e-6, "single-source routing error " + fmt("%.3f", worst_route) + " of the eps bound");
  c.expect(leaks == 0, std::to_string(leaks) + " bins routed to the inactive source");
  c.expect(bad_silence == 0, std::to_string(bad_silence) + " non-zero or NaN bins in silent frames");
  return c.outcome();
}

Outcome toy_learning() {
  constexpr int kRate = 16000;
  TempDir dir;
  const auto examples = toy_duets(10, 16000, kRate, 1);
  TrainConfig c;
  c.name = "toy_backbone";
  c.runs_dir = dir.path().string();
  c.steps = 500;
  c.batch_size = 2;
  c.sample_rate = kRate;
  c.backbone.sample_rate = kRate;
  c.backbone.stft.fft_size = c.backbone.stft.win_size = 256;
  c.backbone.stft.hop_size = 64;
  c.backbone.tcn = {4, 2, 32, 64, 3};
  c.loss.time_loss = TimeLoss::kSiSdr;
  c.loss.stft_mag_weight = 0.0;
  c.loss.stft_ri_weight = 0.0;
  c.optimizer.lr = 2e-3;
  c.log_every = 100;
  c.validate_every = 0;
  c.checkpoint_every = 100000;
  const FixedData data(examples, c.batch_size);

  const auto t0 = std::chrono::steady_clock::now();
  const auto backbone_run = train(c, data);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double backbone = mean_si_sdr_improvement(load_model(backbone_run.last_checkpoint), examples);

  auto j = c;
  j.name = "toy_joint";
  j.steps = 200;
  j.optimizer.lr = 1e-3;
  j.backbone_checkpoint = backbone_run.last_checkpoint.string();
  j.freeze_backbone = true;
  ISRNetConfig isr;
  isr.sample_rate = kRate;
  isr.stft = c.backbone.stft;
  isr.channels = 8;
  isr.n_convnext_blocks = 2;
  isr.kernel = 3;
  isr.freq_boundary_hz = 1500.0;
  j.isrnet = isr;
  const auto joint_model = load_model(joint_finetune(j, data).last_checkpoint);
  const double frozen = mean_si_sdr_improvement(joint_model, examples, true);
  const double refined = mean_si_sdr_improvement(joint_model, examples, false);

  Checks checks;
  checks.expect(backbone > 5.0, "backbone train SI-SDRi " + fmt("%.2f", backbone) + " dB after 500 steps");
  checks.expect(seconds < 900.0, "backbone training " + fmt("%.0f", seconds) + " s");
  checks.expect(refined - frozen > 0.0, "joint refinement " + fmt("%.2f", frozen) + " -> " + fmt("%.2f", refined) +
                                            " dB (gain " + fmt("%+.2f", refined - frozen) + ")");
  return checks.outcome();
}

// Reference oracle improvements (SDRi, SI-SDRi) per category.
struct ReferenceRow {
  Category category;
  OracleKind kind;
  double sdr_i, si_sdr_i;
};

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows{
      {Category::kDuet, OracleKind::kIbm, 16.5, 15.9},       {Category::kDuet, OracleKind::kIrm, 16.1, 15.3},
      {Category::kDuet, OracleKind::kCirm, 56.3, 56.5},      {Category::kUnison, OracleKind::kIbm, 5.6, 4.8},
      {Category::kUnison, OracleKind::kIrm, 4.8, 4.5},       {Category::kUnison, OracleKind::kCirm, 51.5, 51.9},
      {Category::kMainVsRest, OracleKind::kIbm, 14.2, 13.7}, {Category::kMainVsRest, OracleKind::kIrm, 13.7, 13.2},
      {Category::kMainVsRest, OracleKind::kCirm, 56.9, 57.0}};
  return rows;
}

Outcome real_dataset_oracles() {
  const char* env = std::getenv("MEDLEYSEP_MEDLEYVOX_METADATA");
  if (env == nullptr || *env == '\0') return {Status::kSkip, "MEDLEYSEP_MEDLEYVOX_METADATA not set"};
  const fs::path metadata_path(env);
  if (!fs::exists(metadata_path)) return {Status::kSkip, metadata_path.string() + " not found"};
  const auto meta = load_medleyvox_metadata(metadata_path);
  if (meta.segments.empty()) return {Status::kFail, "no valid segments in " + metadata_path.string()};

  EvalOptions opts;
  opts.resample = 24000;
  opts.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string best_detail;
  for (int fft : {512, 1024, 2048}) {
    StftConfig cfg;
    cfg.fft_size = cfg.win_size = fft;
    cfg.hop_size = fft / 4;
    std::map<std::pair<Category, OracleKind>, CellStats> got;
    for (auto kind : {OracleKind::kIbm, OracleKind::kIrm, OracleKind::kCirm}) {
      const SeparateFn separate = [kind, cfg](const AudioBuffer& mix, std::span<const AudioBuffer> refs) {
        return oracle_separate(kind, refs, mix, cfg);
      };
      const auto res = evaluate_dataset(separate, meta.segments, meta.base_dir, opts);
      for (const auto& [key, stats] : res.summary.per_category)
        if (!key.first) got[{key.second, kind}] = stats;
    }
    Checks c;
    int compared = 0;
    for (const auto& row : reference_rows()) {
      const auto it = got.find({row.category, row.kind});
      if (it == got.end() || it->second.segments == 0) continue;
      ++compared;
      const auto& s = it->second;
      const std::string name = to_string(row.category) + " " + to_string(row.kind);
      if (row.kind == OracleKind::kCirm) {
        c.expect(s.mean_sdr_i > 50.0 && s.mean_si_sdr_i > 50.0,
                 name + " " + fmt("%.1f", s.mean_sdr_i) + "/" + fmt("%.1f", s.mean_si_sdr_i));
      } else {
        c.expect(std::abs(s.mean_sdr_i - row.sdr_i) <= 1.5 && std::abs(s.mean_si_sdr_i - row.si_sdr_i) <= 1.5,
                 name + " " + fmt("%.1f", s.mean_sdr_i) + "/" + fmt("%.1f", s.mean_si_sdr_i));
      }
    }
    for (auto cat : {Category::kDuet, Category::kUnison, Category::kMainVsRest}) {
      const auto cirm = got.find({cat, OracleKind::kCirm});
      if (cirm == got.end()) continue;
      for (auto kind : {OracleKind::kIbm, OracleKind::kIrm}) {
        const auto other = got.find({cat, kind});
        if (other != got.end())
          c.expect(cirm->second.mean_si_sdr_i >= other->second.mean_si_sdr_i,
                   to_string(cat) + " cIRM >= " + to_string(kind));
      }
    }
    if (compared == 0) return {Status::kFail, "no category with reference rows was scored"};
    auto out = c.outcome();
    out.detail = "fft " + std::to_string(fft) + ": " + out.detail;
    if (out.status == Status::kPass) return out;
    best_detail += (best_detail.empty() ? "" : " | ") + out.detail;
  }
  return {Status::kFail, best_detail};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mixture consistency invariant", mixture_consistency_invariant},
      {"loss correctness", loss_correctness},
      {"PIT brute-force equivalence", pit_equivalence},
      {"oracle mask ladder", oracle_ladder},
      {"16-bit clipping regression", clipping_regression},
      {"refinement network size", isrnet_efficiency},
      {"heuristic STFT properties", heuristic_properties},
      {"toy learning", toy_learning},
      {"real-data oracle scores", real_dataset_oracles}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    if (o.status == Status::kFail) ++failures;
    std::printf("criterion %zu %s: %s (%s) [%.1fs]\n", i + 1, tag, criteria[i].first.c_str(), o.detail.c_str(), s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
