// src/corpus/medleyvox.cpp

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

#include "medleysep/corpus/medleyvox.h"

#include <fstream>

#include <json.hpp>

#include "medleysep/common/error.h"
#include "medleysep/corpus/manifest.h"

namespace medleysep {
namespace {

using nlohmann::json;

bool uses_two_voices(Category c) { return c == Category::kUnison || c == Category::kDuet; }

}  // namespace

std::string to_string(Category c) {
  switch (c) {
    case Category::kUnison: return "unison";
    case Category::kDuet: return "duet";
    case Category::kMainVsRest: return "main_vs_rest";
    case Category::kNSinging: return "n_singing";
  }
  return "duet";
}

Category category_from_string(const std::string& s) {
  if (s == "unison") return Category::kUnison;
  if (s == "duet") return Category::kDuet;
  if (s == "main_vs_rest") return Category::kMainVsRest;
  if (s == "n_singing") return Category::kNSinging;
  throw std::invalid_argument("unknown category '" + s + "'");
}

std::optional<std::string> validate_segment(const MedleyVoxSegment& s) {
  const auto stems = static_cast<int>(s.stem_paths.size());
  if (s.segment_id.empty()) return "empty segment_id";
  if (s.n_singings < 2) return "n_singings must be at least 2";
  if (s.n_singers < 1) return "n_singers must be at least 1";
  if (!(s.end > s.start)) return "end must be after start";
  if (s.mixture_path.empty()) return "empty mixture_path";
  if (s.category == Category::kUnison && s.n_singings != 2) return "unison segments have exactly 2 singings";
  if (uses_two_voices(s.category) && stems != s.n_singings)
    return "expected " + std::to_string(s.n_singings) + " stems, got " + std::to_string(stems);
  if (s.category == Category::kMainVsRest) {
    if (stems == 2) {
      if (s.main_index && *s.main_index != 0) return "(main, rest) stem pairs must have main_index 0";
    } else if (stems == s.n_singings) {
      if (!s.main_index) return "main_index required when all singings are listed";
      if (*s.main_index < 0 || *s.main_index >= stems) return "main_index out of range";
    } else {
      return "main_vs_rest expects 2 stems (main, rest) or n_singings stems, got " + std::to_string(stems);
    }
  }
  if (s.category == Category::kNSinging && stems != s.n_singings)
    return "expected " + std::to_string(s.n_singings) + " stems, got " + std::to_string(stems);
  if (s.category != Category::kMainVsRest && s.main_index) return "main_index only applies to main_vs_rest";
  return std::nullopt;
}

MedleyVoxMetadata load_medleyvox_metadata(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path.string() + ": cannot open metadata");
  MedleyVoxMetadata out;
  out.base_dir = path.parent_path();
  std::string text;
  std::size_t line = 0;
  while (std::getline(f, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ManifestError(path.string() + ":" + std::to_string(line) + ": malformed JSON: " + e.what(), line);
    }
    MedleyVoxSegment s;
    try {
      s.segment_id = j.at("segment_id").get<std::string>();
      s.song_id = j.at("song_id").get<std::string>();
      s.category = category_from_string(j.at("category").get<std::string>());
      s.n_singings = j.at("n_singings").get<int>();
      s.n_singers = j.at("n_singers").get<int>();
      s.start = j.at("start").get<double>();
      s.end = j.at("end").get<double>();
      s.mixture_path = j.at("mixture_path").get<std::string>();
      s.stem_paths = j.at("stem_paths").get<std::vector<std::string>>();
      if (j.contains("main_index") && !j["main_index"].is_null()) s.main_index = j["main_index"].get<int>();
    } catch (const std::exception& e) {
      out.rejected.push_back({line, j.value("segment_id", std::string()), std::string("schema: ") + e.what()});
      continue;
    }
    if (auto reason = validate_segment(s)) {
      out.rejected.push_back({line, s.segment_id, *reason});
      continue;
    }
    out.segments.push_back(std::move(s));
  }
  return out;
}

std::string to_json_line(const MedleyVoxSegment& s) {
  json j;
  j["segment_id"] = s.segment_id;
  j["song_id"] = s.song_id;
  j["category"] = to_string(s.category);
  j["n_singings"] = s.n_singings;
  j["n_singers"] = s.n_singers;
  j["start"] = s.start;
  j["end"] = s.end;
  j["mixture_path"] = s.mixture_path;
  j["stem_paths"] = s.stem_paths;
  if (s.main_index) j["main_index"] = *s.main_index;
  return j.dump();
}

MedleyVoxSummary summarize(const std::vector<MedleyVoxSegment>& segments) {
  MedleyVoxSummary out;
  auto add = [](SegmentStats& st, const MedleyVoxSegment& s) {
    ++st.segments;
    st.seconds += s.length();
    st.songs.insert(s.song_id);
  };
  for (const auto& s : segments) {
    add(out.per_category[s.category], s);
    add(out.per_cell[{s.category, s.n_singings, s.n_singers}], s);
    add(out.total, s);
  }
  return out;
}

}  // namespace medleysep
