// src/evaluation/evaluate.cpp

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

#include "medleysep/evaluation/evaluate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "medleysep/audio/resample.h"
#include "medleysep/audio/wav.h"
#include "medleysep/common/paths.h"

namespace medleysep {
namespace {

std::vector<std::vector<double>> to_vectors(std::span<const AudioBuffer> xs) {
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.vec());
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

bool uses_best_permutation(PermutationMode mode, Category c) {
  switch (mode) {
    case PermutationMode::kBest:
      return true;
    case PermutationMode::kFixed:
      return false;
    case PermutationMode::kAuto:
      return c == Category::kUnison || c == Category::kDuet;
  }
  return false;
}

struct LoadedSegment {
  AudioBuffer mixture;
  std::vector<AudioBuffer> stems;
};

// Stems may be a couple of samples off after independent resampling.
constexpr std::size_t kLengthSlack = 2;

LoadedSegment load_segment(const MedleyVoxSegment& s, const std::filesystem::path& base_dir, int rate) {
  auto load = [&](const std::string& p) {
    auto x = read_wav(resolve_data_path(p, base_dir));
    return rate > 0 ? resample(x, rate) : x;
  };
  AudioBuffer mixture = load(s.mixture_path);
  std::vector<AudioBuffer> stems;
  for (const auto& p : s.stem_paths) stems.push_back(load(p));
  std::size_t len = mixture.size();
  for (const auto& x : stems) {
    if (x.sample_rate() != mixture.sample_rate())
      throw std::invalid_argument("stem and mixture sample rates differ");
    if (x.size() + kLengthSlack < mixture.size() || mixture.size() + kLengthSlack < x.size())
      throw std::invalid_argument("stem and mixture lengths differ");
    len = std::min(len, x.size());
  }
  for (auto& x : stems) x = x.slice(0, len);
  return {mixture.slice(0, len), std::move(stems)};
}

// One segment -> its records, or the reason it was skipped.
struct SegmentOutcome {
  std::vector<EvalRecord> records;
  std::optional<std::string> skipped;
};

SegmentOutcome run_segment(const SeparateFn& separate, const MedleyVoxSegment& segment, const AudioBuffer& mixture,
                           std::span<const AudioBuffer> stems, const EvalOptions& options) {
  SegmentOutcome out;
  try {
    const auto refs = evaluation_references(segment, stems);
    const auto estimates = separate(mixture, refs);
    if (estimates.size() != refs.size())
      throw std::invalid_argument("separator produced " + std::to_string(estimates.size()) + " outputs for " +
                                  std::to_string(refs.size()) + " references");
    for (const auto& e : estimates)
      if (e.size() != mixture.size()) throw std::invalid_argument("estimate length differs from the mixture");
    out.records.push_back(score_segment(segment, estimates, refs, mixture, false, options));
    if (options.clipped_eval) out.records.push_back(score_segment(segment, estimates, refs, mixture, true, options));
  } catch (const std::exception& e) {
    out.records.clear();
    out.skipped = e.what();
  }
  return out;
}

template <typename Fn>
EvalResult run_all(std::size_t n, std::size_t workers, const std::vector<MedleyVoxSegment>& segments, Fn&& one) {
  std::vector<SegmentOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) outcomes[i] = one(i);
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  EvalResult result;
  std::vector<SkippedSegment> skipped;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes[i].skipped) {
      spdlog::warn("skipping segment {}: {}", segments[i].segment_id, *outcomes[i].skipped);
      skipped.push_back({segments[i].segment_id, *outcomes[i].skipped});
    }
    for (auto& r : outcomes[i].records) result.records.push_back(std::move(r));
  }
  result.summary = summarize(result.records, std::move(skipped));
  return result;
}

void accumulate_cell(CellStats& cell, const std::vector<const EvalRecord*>& rs) {
  std::vector<double> sdr, si;
  for (const auto* r : rs) {
    si.push_back(r->mean_si_sdr_i());
    if (!r->sdr_i.empty()) sdr.push_back(r->mean_sdr_i());
  }
  cell.segments = rs.size();
  cell.mean_si_sdr_i = mean_of(si);
  cell.median_si_sdr_i = median_of(si);
  cell.mean_sdr_i = mean_of(sdr);
  cell.median_sdr_i = median_of(sdr);
}

}  // namespace

std::string to_string(PermutationMode m) {
  switch (m) {
    case PermutationMode::kAuto:
      return "auto";
    case PermutationMode::kBest:
      return "best";
    case PermutationMode::kFixed:
      return "fixed";
  }
  return "auto";
}

PermutationMode permutation_mode_from_string(const std::string& name) {
  if (name == "auto") return PermutationMode::kAuto;
  if (name == "best" || name == "pit") return PermutationMode::kBest;
  if (name == "fixed") return PermutationMode::kFixed;
  throw std::invalid_argument("unknown permutation mode: " + name);
}

double EvalRecord::mean_si_sdr_i() const { return mean_of(si_sdr_i); }
double EvalRecord::mean_sdr_i() const { return mean_of(sdr_i); }

std::vector<AudioBuffer> evaluation_references(const MedleyVoxSegment& segment, std::span<const AudioBuffer> stems) {
  if (stems.empty()) throw std::invalid_argument("segment has no stems");
  if (segment.category != Category::kMainVsRest || stems.size() == 2) return {stems.begin(), stems.end()};
  const std::size_t main = static_cast<std::size_t>(segment.main_index.value_or(0));
  if (main >= stems.size()) throw std::invalid_argument("main_index out of range");
  std::vector<AudioBuffer> rest;
  for (std::size_t i = 0; i < stems.size(); ++i)
    if (i != main) rest.push_back(stems[i]);
  return {stems[main], sum_buffers(rest)};
}

EvalRecord score_segment(const MedleyVoxSegment& segment, std::span<const AudioBuffer> estimates,
                         std::span<const AudioBuffer> references, const AudioBuffer& mixture, bool clipped,
                         const EvalOptions& options) {
  std::vector<std::vector<double>> ests;
  for (const auto& e : estimates) ests.push_back(clipped ? wav_round_trip(e, WavFormat::kPcm16).vec() : e.vec());
  const auto refs = to_vectors(references);
  std::vector<std::size_t> perm(refs.size());
  std::iota(perm.begin(), perm.end(), 0);
  if (uses_best_permutation(options.permutation_mode, segment.category)) perm = best_si_sdr_permutation(ests, refs);
  auto s = score_separation(ests, refs, mixture.samples(), perm, options.compute_sdr, options.filter_taps);

  EvalRecord r;
  r.segment_id = segment.segment_id;
  r.song_id = segment.song_id;
  r.category = segment.category;
  r.n_singings = segment.n_singings;
  r.n_singers = segment.n_singers;
  r.sdr_i = std::move(s.sdr_i);
  r.si_sdr_i = std::move(s.si_sdr_i);
  r.sdr = std::move(s.sdr);
  r.si_sdr = std::move(s.si_sdr);
  r.permutation_used = std::move(s.permutation);
  r.clipped_eval = clipped;
  r.regularized = s.regularized;
  r.reduced_taps = s.reduced_taps;
  return r;
}

EvalSummary summarize(const std::vector<EvalRecord>& records, std::vector<SkippedSegment> skipped) {
  EvalSummary s;
  s.zero_segments = records.empty();
  s.skipped = std::move(skipped);
  std::map<std::pair<bool, Category>, std::vector<const EvalRecord*>> by_category;
  std::map<std::tuple<bool, Category, int, int>, std::vector<const EvalRecord*>> by_cell;
  for (const auto& r : records) {
    s.has_sdr = s.has_sdr || !r.sdr_i.empty();
    by_category[{r.clipped_eval, r.category}].push_back(&r);
    by_cell[{r.clipped_eval, r.category, r.n_singings, r.n_singers}].push_back(&r);
  }
  for (const auto& [k, rs] : by_category) accumulate_cell(s.per_category[k], rs);
  for (const auto& [k, rs] : by_cell) accumulate_cell(s.per_cell[k], rs);
  return s;
}

EvalResult evaluate_dataset(const SeparateFn& separate, const std::vector<MedleyVoxSegment>& segments,
                            const std::filesystem::path& base_dir, const EvalOptions& options) {
  return run_all(segments.size(), options.workers, segments, [&](std::size_t i) {
    SegmentOutcome out;
    std::optional<LoadedSegment> loaded;
    try {
      loaded = load_segment(segments[i], base_dir, options.resample);
    } catch (const std::exception& e) {
      out.skipped = e.what();
      return out;
    }
    return run_segment(separate, segments[i], loaded->mixture, loaded->stems, options);
  });
}

EvalResult evaluate_in_memory(const SeparateFn& separate, const std::vector<MedleyVoxSegment>& segments,
                              const std::vector<std::vector<AudioBuffer>>& stems, const EvalOptions& options) {
  if (stems.size() != segments.size()) throw std::invalid_argument("evaluate_in_memory: one stem list per segment");
  return run_all(segments.size(), options.workers, segments, [&](std::size_t i) {
    const auto& st = stems[i];
    if (st.empty()) return SegmentOutcome{{}, std::string("segment has no stems")};
    std::vector<AudioBuffer> in;
    for (const auto& x : st) in.push_back(options.resample > 0 ? resample(x, options.resample) : x);
    return run_segment(separate, segments[i], sum_buffers(in), in, options);
  });
}

nlohmann::json to_json(const EvalRecord& r) {
  nlohmann::json j;
  j["segment_id"] = r.segment_id;
  j["song_id"] = r.song_id;
  j["category"] = to_string(r.category);
  j["n_singings"] = r.n_singings;
  j["n_singers"] = r.n_singers;
  j["sdr_i"] = r.sdr_i;
  j["si_sdr_i"] = r.si_sdr_i;
  j["sdr"] = r.sdr;
  j["si_sdr"] = r.si_sdr;
  j["permutation_used"] = r.permutation_used;
  j["clipped_eval"] = r.clipped_eval;
  j["regularized"] = r.regularized;
  j["reduced_taps"] = r.reduced_taps;
  return j;
}

namespace {
nlohmann::json cell_json(const CellStats& c) {
  return {{"segments", c.segments},          {"mean_sdr_i", c.mean_sdr_i},
          {"median_sdr_i", c.median_sdr_i},  {"mean_si_sdr_i", c.mean_si_sdr_i},
          {"median_si_sdr_i", c.median_si_sdr_i}};
}
}  // namespace

nlohmann::json to_json(const EvalSummary& s) {
  nlohmann::json j;
  j["zero_segments"] = s.zero_segments;
  j["has_sdr"] = s.has_sdr;
  j["per_category"] = nlohmann::json::array();
  for (const auto& [k, c] : s.per_category) {
    auto e = cell_json(c);
    e["clipped_eval"] = k.first;
    e["category"] = to_string(k.second);
    j["per_category"].push_back(e);
  }
  j["per_cell"] = nlohmann::json::array();
  for (const auto& [k, c] : s.per_cell) {
    auto e = cell_json(c);
    e["clipped_eval"] = std::get<0>(k);
    e["category"] = to_string(std::get<1>(k));
    e["n_singings"] = std::get<2>(k);
    e["n_singers"] = std::get<3>(k);
    j["per_cell"].push_back(e);
  }
  j["skipped"] = nlohmann::json::array();
  for (const auto& k : s.skipped) j["skipped"].push_back({{"segment_id", k.segment_id}, {"reason", k.reason}});
  return j;
}

std::string format_summary_table(const EvalSummary& s) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-9s %8s %10s %10s %10s %10s\n", "category", "mode", "segments",
                "SDRi mean", "SDRi med", "SI-SDRi mn", "SI-SDRi md");
  os << line;
  for (const auto& [k, c] : s.per_category) {
    const char* mode = k.first ? "clipped" : "float";
    if (s.has_sdr)
      std::snprintf(line, sizeof line, "%-14s %-9s %8zu %10.2f %10.2f %10.2f %10.2f\n", to_string(k.second).c_str(),
                    mode, c.segments, c.mean_sdr_i, c.median_sdr_i, c.mean_si_sdr_i, c.median_si_sdr_i);
    else
      std::snprintf(line, sizeof line, "%-14s %-9s %8zu %10s %10s %10.2f %10.2f\n", to_string(k.second).c_str(), mode,
                    c.segments, "-", "-", c.mean_si_sdr_i, c.median_si_sdr_i);
    os << line;
  }
  if (s.zero_segments) os << "(no segments scored)\n";
  if (!s.skipped.empty()) os << s.skipped.size() << " segment(s) skipped\n";
  return os.str();
}

}  // namespace medleysep
