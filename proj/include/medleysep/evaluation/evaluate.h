// include/medleysep/evaluation/evaluate.h

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

#ifndef MEDLEYSEP_EVALUATION_EVALUATE_H_
#define MEDLEYSEP_EVALUATION_EVALUATE_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/corpus/medleyvox.h"
#include "medleysep/evaluation/metrics.h"

namespace medleysep {

// Produces one estimate per reference. Oracles read the references; learned
// models ignore them.
using SeparateFn =
    std::function<std::vector<AudioBuffer>(const AudioBuffer& mixture, std::span<const AudioBuffer> references)>;

enum class PermutationMode {
  kAuto,   // best permutation for unison/duet, fixed order otherwise
  kBest,
  kFixed,
};

std::string to_string(PermutationMode m);
PermutationMode permutation_mode_from_string(const std::string& name);

struct EvalOptions {
  PermutationMode permutation_mode = PermutationMode::kAuto;
  // Also score the estimates after a 16-bit WAV round trip.
  bool clipped_eval = false;
  // Resample all audio to this rate before separating; 0 keeps file rates.
  int resample = 0;
  bool compute_sdr = true;
  std::size_t filter_taps = kBssTaps;
  std::size_t workers = 1;
};

struct EvalRecord {
  std::string segment_id;
  std::string song_id;
  Category category = Category::kDuet;
  int n_singings = 0;
  int n_singers = 0;
  std::vector<double> sdr_i;  // per reference; empty when SDR is disabled
  std::vector<double> si_sdr_i;
  std::vector<double> sdr;
  std::vector<double> si_sdr;
  std::vector<std::size_t> permutation_used;
  bool clipped_eval = false;
  bool regularized = false;
  bool reduced_taps = false;

  double mean_si_sdr_i() const;
  double mean_sdr_i() const;
};

// The references a category is scored against: every stem for unison, duet
// and n_singing; (main, sum of the others) for main_vs_rest.
std::vector<AudioBuffer> evaluation_references(const MedleyVoxSegment& segment, std::span<const AudioBuffer> stems);

// Scores one already-separated segment. With `clipped`, the estimates go
// through a 16-bit WAV round trip first.
EvalRecord score_segment(const MedleyVoxSegment& segment, std::span<const AudioBuffer> estimates,
                         std::span<const AudioBuffer> references, const AudioBuffer& mixture, bool clipped,
                         const EvalOptions& options);

struct CellStats {
  std::size_t segments = 0;
  double mean_sdr_i = 0.0;
  double median_sdr_i = 0.0;
  double mean_si_sdr_i = 0.0;
  double median_si_sdr_i = 0.0;
};

struct SkippedSegment {
  std::string segment_id;
  std::string reason;
};

struct EvalSummary {
  bool zero_segments = true;
  bool has_sdr = false;
  // Keyed by (clipped_eval, category).
  std::map<std::pair<bool, Category>, CellStats> per_category;
  // Keyed by (clipped_eval, category, n_singings, n_singers).
  std::map<std::tuple<bool, Category, int, int>, CellStats> per_cell;
  std::vector<SkippedSegment> skipped;
};

// Statistics over per-segment means (each segment weighs the same).
EvalSummary summarize(const std::vector<EvalRecord>& records, std::vector<SkippedSegment> skipped = {});

struct EvalResult {
  std::vector<EvalRecord> records;
  EvalSummary summary;
};

// Loads, separates and scores every segment. Audio paths resolve against
// base_dir (or $MEDLEYSEP_DATA_ROOT). Unreadable or unusable segments are
// skipped and listed; the run never aborts on a single segment.
EvalResult evaluate_dataset(const SeparateFn& separate, const std::vector<MedleyVoxSegment>& segments,
                            const std::filesystem::path& base_dir, const EvalOptions& options);

// Same, for segments whose audio is already in memory (stems[i] belong to
// segments[i]; the mixture is the stem sum).
EvalResult evaluate_in_memory(const SeparateFn& separate, const std::vector<MedleyVoxSegment>& segments,
                              const std::vector<std::vector<AudioBuffer>>& stems, const EvalOptions& options);

nlohmann::json to_json(const EvalRecord& r);
nlohmann::json to_json(const EvalSummary& s);

// Fixed-width category x metric table.
std::string format_summary_table(const EvalSummary& s);

}  // namespace medleysep

#endif  // MEDLEYSEP_EVALUATION_EVALUATE_H_
