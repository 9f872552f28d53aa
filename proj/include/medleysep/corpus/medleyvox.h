// include/medleysep/corpus/medleyvox.h

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

#ifndef MEDLEYSEP_CORPUS_MEDLEYVOX_H_
#define MEDLEYSEP_CORPUS_MEDLEYVOX_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace medleysep {

enum class Category { kUnison, kDuet, kMainVsRest, kNSinging };

std::string to_string(Category c);
Category category_from_string(const std::string& s);

// One annotated evaluation segment. Stem and mixture paths are relative to
// the metadata file (or $MEDLEYSEP_DATA_ROOT) unless absolute.
struct MedleyVoxSegment {
  std::string segment_id;
  std::string song_id;
  Category category = Category::kDuet;
  int n_singings = 2;
  int n_singers = 1;
  double start = 0.0;
  double end = 0.0;
  std::string mixture_path;
  std::vector<std::string> stem_paths;
  std::optional<int> main_index;

  double length() const { return end - start; }
};

// Reason the segment violates the schema, or nullopt when it is valid.
std::optional<std::string> validate_segment(const MedleyVoxSegment& s);

struct SegmentRejection {
  std::size_t line = 0;
  std::string segment_id;
  std::string reason;
};

struct MedleyVoxMetadata {
  std::vector<MedleyVoxSegment> segments;
  std::vector<SegmentRejection> rejected;
  std::filesystem::path base_dir;
};

// Throws ManifestError on unparsable lines; schema violations are collected
// per segment in `rejected`.
MedleyVoxMetadata load_medleyvox_metadata(const std::filesystem::path& path);

std::string to_json_line(const MedleyVoxSegment& s);

struct SegmentStats {
  int segments = 0;
  double seconds = 0.0;
  std::set<std::string> songs;
};

struct MedleyVoxSummary {
  std::map<Category, SegmentStats> per_category;
  // Keyed by (category, n_singings, n_singers).
  std::map<std::tuple<Category, int, int>, SegmentStats> per_cell;
  SegmentStats total;
};

MedleyVoxSummary summarize(const std::vector<MedleyVoxSegment>& segments);

}  // namespace medleysep

#endif  // MEDLEYSEP_CORPUS_MEDLEYVOX_H_
