// src/corpus/manifest.cpp

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

#include "medleysep/corpus/manifest.h"

#include <fstream>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "medleysep/common/error.h"
#include "medleysep/common/paths.h"

namespace medleysep {
namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_string())
    throw ManifestError("line " + std::to_string(line) + ": missing string field '" + key + "'", line);
  return j[key].get<std::string>();
}

}  // namespace

std::string to_string(Domain d) { return d == Domain::kSinging ? "singing" : "speech"; }

Domain domain_from_string(const std::string& s) {
  if (s == "singing") return Domain::kSinging;
  if (s == "speech") return Domain::kSpeech;
  throw std::invalid_argument("unknown domain '" + s + "' (expected singing or speech)");
}

Manifest::Manifest(std::vector<SourceRecord> records, std::vector<std::string> corpus_names,
                   std::vector<double> corpus_weights)
    : records_(std::move(records)),
      corpus_names_(std::move(corpus_names)),
      corpus_weights_(std::move(corpus_weights)) {
  std::size_t n_corpora = 1;
  for (const auto& r : records_) n_corpora = std::max(n_corpora, r.corpus + 1);
  if (corpus_names_.size() < n_corpora) corpus_names_.resize(n_corpora);
  if (corpus_weights_.size() < n_corpora) corpus_weights_.resize(n_corpora, 1.0);

  std::set<std::string> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto& r = records_[i];
    if (r.utterance_id.empty()) throw ManifestError("record " + std::to_string(i) + ": empty utterance_id", 0);
    if (!seen.insert(r.utterance_id).second)
      throw ManifestError("duplicate utterance_id '" + r.utterance_id + "'", 0);
    if (!(r.duration > 0.0))
      throw ManifestError("utterance '" + r.utterance_id + "': duration must be positive", 0);
    if (r.domain == Domain::kSpeech) r.song_id.clear();
    by_singer_[r.singer_id].push_back(i);
    if (!r.song_id.empty()) by_song_[r.song_id].push_back(i);
    (r.domain == Domain::kSinging ? singing_ : speech_).push_back(i);
  }
}

Manifest Manifest::merge(const std::vector<Manifest>& parts, const std::vector<double>& weights) {
  std::vector<SourceRecord> all;
  std::vector<std::string> names;
  std::vector<double> w;
  std::size_t skipped = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (auto r : parts[p].records()) {
      r.corpus = p;
      all.push_back(std::move(r));
    }
    names.push_back(parts[p].corpus_names().empty() ? std::string() : parts[p].corpus_names().front());
    w.push_back(p < weights.size() ? weights[p] : 1.0);
    skipped += parts[p].skipped_missing();
  }
  Manifest m(std::move(all), std::move(names), std::move(w));
  m.set_skipped_missing(skipped);
  return m;
}

Manifest load_manifest(const std::filesystem::path& path, const ManifestLoadOptions& options) {
  std::ifstream f(path);
  if (!f) throw IoError(path.string() + ": cannot open manifest");
  const auto base = path.parent_path();

  std::vector<SourceRecord> records;
  std::map<std::string, std::size_t> first_line;
  std::size_t skipped = 0;
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
    if (!j.is_object()) throw ManifestError(path.string() + ":" + std::to_string(line) + ": expected an object", line);

    SourceRecord r;
    try {
      r.utterance_id = require_string(j, "utterance_id", line);
      r.audio_path = require_string(j, "audio_path", line);
      r.singer_id = require_string(j, "singer_id", line);
      r.song_id = j.value("song_id", std::string());
      r.domain = domain_from_string(require_string(j, "domain", line));
      if (!j.contains("duration") || !j["duration"].is_number())
        throw ManifestError("line " + std::to_string(line) + ": missing numeric field 'duration'", line);
      r.duration = j["duration"].get<double>();
    } catch (const std::invalid_argument& e) {
      throw ManifestError(path.string() + ":" + std::to_string(line) + ": " + e.what(), line);
    } catch (const ManifestError& e) {
      throw ManifestError(path.string() + ": " + e.what(), line);
    }
    if (!(r.duration > 0.0))
      throw ManifestError(path.string() + ":" + std::to_string(line) + ": duration must be positive", line);
    if (auto [it, fresh] = first_line.emplace(r.utterance_id, line); !fresh)
      throw ManifestError(path.string() + ":" + std::to_string(line) + ": duplicate utterance_id '" +
                              r.utterance_id + "' (first seen on line " + std::to_string(it->second) + ")",
                          line);
    r.resolved_path = resolve_data_path(r.audio_path, base);
    if (options.check_audio_exists && !std::filesystem::exists(r.resolved_path)) {
      spdlog::warn("{}:{}: audio file {} not found, skipping", path.string(), line, r.resolved_path.string());
      ++skipped;
      continue;
    }
    records.push_back(std::move(r));
  }
  Manifest m(std::move(records), {path.stem().string()}, {1.0});
  m.set_skipped_missing(skipped);
  return m;
}

std::string to_json_line(const SourceRecord& r) {
  json j;
  j["utterance_id"] = r.utterance_id;
  j["audio_path"] = r.audio_path;
  j["singer_id"] = r.singer_id;
  j["song_id"] = r.song_id;
  j["domain"] = to_string(r.domain);
  j["duration"] = r.duration;
  return j.dump();
}

}  // namespace medleysep
