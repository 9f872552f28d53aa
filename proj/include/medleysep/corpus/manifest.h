// include/medleysep/corpus/manifest.h

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

#ifndef MEDLEYSEP_CORPUS_MANIFEST_H_
#define MEDLEYSEP_CORPUS_MANIFEST_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace medleysep {

enum class Domain { kSinging, kSpeech };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

// One single-voice utterance from a training corpus.
struct SourceRecord {
  std::string utterance_id;
  std::string audio_path;
  std::string singer_id;
  std::string song_id;  // empty for speech
  Domain domain = Domain::kSinging;
  double duration = 0.0;  // seconds

  // Not serialised: audio_path resolved against the data root at load time,
  // and the index of the corpus (manifest) the record came from.
  std::filesystem::path resolved_path;
  std::size_t corpus = 0;
};

// Malformed manifest content. line() is 1-based, 0 when not line specific.
class ManifestError : public std::runtime_error {
 public:
  ManifestError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ManifestLoadOptions {
  // Skip (and count) records whose audio file does not exist.
  bool check_audio_exists = true;
};

// Validated record list with grouping indices for correlated sampling.
class Manifest {
 public:
  Manifest() = default;
  // Throws ManifestError on duplicate ids or invalid records.
  explicit Manifest(std::vector<SourceRecord> records, std::vector<std::string> corpus_names = {},
                    std::vector<double> corpus_weights = {});

  // Concatenates manifests; each input becomes one weighted corpus.
  static Manifest merge(const std::vector<Manifest>& parts, const std::vector<double>& weights);

  const std::vector<SourceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Indices into records(). Every record belongs to exactly one singer group
  // and to at most one song group (speech and empty song ids have none).
  const std::map<std::string, std::vector<std::size_t>>& singer_index() const { return by_singer_; }
  const std::map<std::string, std::vector<std::size_t>>& song_index() const { return by_song_; }
  const std::vector<std::size_t>& domain_pool(Domain d) const {
    return d == Domain::kSinging ? singing_ : speech_;
  }

  const std::vector<std::string>& corpus_names() const { return corpus_names_; }
  const std::vector<double>& corpus_weights() const { return corpus_weights_; }

  std::size_t skipped_missing() const { return skipped_missing_; }
  void set_skipped_missing(std::size_t n) { skipped_missing_ = n; }

 private:
  std::vector<SourceRecord> records_;
  std::vector<std::string> corpus_names_;
  std::vector<double> corpus_weights_;
  std::map<std::string, std::vector<std::size_t>> by_singer_;
  std::map<std::string, std::vector<std::size_t>> by_song_;
  std::vector<std::size_t> singing_;
  std::vector<std::size_t> speech_;
  std::size_t skipped_missing_ = 0;
};

// Reads a JSON Lines manifest (one SourceRecord object per line).
Manifest load_manifest(const std::filesystem::path& path, const ManifestLoadOptions& options = {});

std::string to_json_line(const SourceRecord& r);

}  // namespace medleysep

#endif  // MEDLEYSEP_CORPUS_MANIFEST_H_
