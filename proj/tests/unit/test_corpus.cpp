// tests/unit/test_corpus.cpp

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

#include <cstdlib>
#include <fstream>

#include "medleysep/common/error.h"
#include "medleysep/common/paths.h"
#include "medleysep/corpus/manifest.h"
#include "medleysep/corpus/medleyvox.h"
#include "test_support.h"

using namespace medleysep;
using namespace medleysep::testing;

namespace {

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream f(p);
  for (const auto& l : lines) f << l << "\n";
}

std::string record(const std::string& id, const std::string& singer, const std::string& song,
                   const std::string& domain = "singing", double dur = 2.0) {
  return R"({"utterance_id":")" + id + R"(","audio_path":")" + id + R"(.wav","singer_id":")" + singer +
         R"(","song_id":")" + song + R"(","domain":")" + domain + R"(","duration":)" + std::to_string(dur) + "}";
}

}  // namespace

TEST_CASE("load_manifest: empty file gives empty manifest") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {});
  const auto m = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  CHECK(m.empty());
  CHECK(m.singer_index().empty());
}

TEST_CASE("load_manifest: three records and grouping indices") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "songA"), record("b", "s1", "songB"),
                                        record("c", "s2", "songA"), ""});
  const auto m = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  REQUIRE(m.size() == 3);
  CHECK(m.singer_index().at("s1") == std::vector<std::size_t>{0, 1});
  CHECK(m.singer_index().at("s2") == std::vector<std::size_t>{2});
  CHECK(m.song_index().at("songA") == std::vector<std::size_t>{0, 2});
  CHECK(m.records()[1].resolved_path == dir.path() / "b.wav");
}

TEST_CASE("load_manifest: duplicate utterance id rejected with its line number") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "x"), record("b", "s1", "x"), record("a", "s2", "y")});
  try {
    load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("load_manifest: malformed line and missing fields report the line number") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "x"), "{not json"});
  try {
    load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 2);
  }
  write_lines(dir.path() / "n.jsonl", {R"({"utterance_id":"a","audio_path":"a.wav","domain":"singing","duration":1})"});
  CHECK_THROWS_AS(load_manifest(dir.path() / "n.jsonl", {.check_audio_exists = false}), ManifestError);
  write_lines(dir.path() / "o.jsonl", {record("a", "s1", "x", "singing", -1.0)});
  CHECK_THROWS_AS(load_manifest(dir.path() / "o.jsonl", {.check_audio_exists = false}), ManifestError);
  CHECK_THROWS_AS(load_manifest(dir.path() / "absent.jsonl"), IoError);
}

TEST_CASE("load_manifest: missing audio files are skipped and counted") {
  TempDir dir;
  std::ofstream(dir.path() / "a.wav") << "x";
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "x"), record("b", "s1", "x")});
  const auto m = load_manifest(dir.path() / "m.jsonl");
  CHECK(m.size() == 1);
  CHECK(m.skipped_missing() == 1);
}

TEST_CASE("load_manifest: data root environment variable prefixes relative paths") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "x")});
  setenv(kDataRootEnv, "/data/root", 1);
  const auto m = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  unsetenv(kDataRootEnv);
  CHECK(m.records()[0].resolved_path == std::filesystem::path("/data/root/a.wav"));
  CHECK(resolve_data_path("/abs/x.wav", "/base") == std::filesystem::path("/abs/x.wav"));
}

TEST_CASE("manifest: speech records have no song group; groups partition records") {
  TempDir dir;
  write_lines(dir.path() / "m.jsonl", {record("a", "s1", "x"), record("b", "spk1", "ignored", "speech"),
                                        record("c", "spk1", "", "speech"), record("d", "s2", "x")});
  const auto m = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  CHECK(m.records()[1].song_id.empty());
  CHECK(m.domain_pool(Domain::kSpeech).size() == 2);
  CHECK(m.domain_pool(Domain::kSinging).size() == 2);
  std::vector<int> singer_hits(m.size(), 0), song_hits(m.size(), 0);
  for (const auto& [_, idx] : m.singer_index())
    for (auto i : idx) ++singer_hits[i];
  for (const auto& [_, idx] : m.song_index())
    for (auto i : idx) ++song_hits[i];
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(singer_hits[i] == 1);
    CHECK(song_hits[i] <= 1);
  }
}

TEST_CASE("manifest: loading is idempotent and order-stable") {
  TempDir dir;
  std::vector<std::string> lines;
  for (int i = 0; i < 20; ++i) lines.push_back(record("u" + std::to_string(19 - i), "s" + std::to_string(i % 4), "x"));
  write_lines(dir.path() / "m.jsonl", lines);
  const auto a = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  const auto b = load_manifest(dir.path() / "m.jsonl", {.check_audio_exists = false});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.records()[i].utterance_id == b.records()[i].utterance_id);
    CHECK(a.records()[i].utterance_id == "u" + std::to_string(19 - i));
  }
  CHECK(a.singer_index() == b.singer_index());
}

TEST_CASE("manifest: merge tags corpora and rejects cross-manifest duplicates") {
  Manifest a({{"a", "a.wav", "s", "x", Domain::kSinging, 1.0}});
  Manifest b({{"b", "b.wav", "t", "", Domain::kSpeech, 1.0}});
  const auto m = Manifest::merge({a, b}, {2.0, 0.5});
  CHECK(m.records()[1].corpus == 1);
  CHECK(m.corpus_weights() == std::vector<double>{2.0, 0.5});
  CHECK_THROWS_AS(Manifest::merge({a, a}, {}), ManifestError);
}

TEST_CASE("medleyvox: segment validation") {
  MedleyVoxSegment s{"seg", "song", Category::kUnison, 2, 1, 0.0, 4.0, "mix.wav", {"a.wav", "b.wav"}, {}};
  CHECK_FALSE(validate_segment(s).has_value());
  auto bad = s;
  bad.stem_paths.push_back("c.wav");
  CHECK(validate_segment(bad).has_value());
  bad = s;
  bad.n_singings = 3;
  bad.stem_paths.push_back("c.wav");
  CHECK(validate_segment(bad).value().find("unison") != std::string::npos);
  auto mvr = s;
  mvr.category = Category::kMainVsRest;
  mvr.n_singings = 4;
  CHECK_FALSE(validate_segment(mvr).has_value());  // (main, rest) pair
  mvr.stem_paths = {"a", "b", "c", "d"};
  CHECK(validate_segment(mvr).has_value());  // all stems but no main index
  mvr.main_index = 2;
  CHECK_FALSE(validate_segment(mvr).has_value());
  mvr.main_index = 4;
  CHECK(validate_segment(mvr).has_value());
}

TEST_CASE("medleyvox: synthetic two-segment file loads; bad segments are rejected per segment") {
  TempDir dir;
  MedleyVoxSegment a{"a", "song", Category::kDuet, 2, 2, 1.0, 5.0, "a/mix.wav", {"a/0.wav", "a/1.wav"}, {}};
  MedleyVoxSegment b{"b", "song", Category::kMainVsRest, 3, 1, 0.0, 7.5, "b/mix.wav", {"b/main.wav", "b/rest.wav"}, 0};
  MedleyVoxSegment c{"c", "song", Category::kUnison, 2, 1, 0.0, 2.0, "c/mix.wav", {"0", "1", "2"}, {}};
  write_lines(dir.path() / "meta.jsonl", {to_json_line(a), to_json_line(b), to_json_line(c), R"({"segment_id":"d"})"});
  const auto meta = load_medleyvox_metadata(dir.path() / "meta.jsonl");
  REQUIRE(meta.segments.size() == 2);
  CHECK(meta.segments[1].main_index == 0);
  CHECK(meta.segments[0].stem_paths[1] == "a/1.wav");
  REQUIRE(meta.rejected.size() == 2);
  CHECK(meta.rejected[0].line == 3);
  CHECK(meta.rejected[0].segment_id == "c");
  CHECK(meta.rejected[1].segment_id == "d");
  CHECK(meta.base_dir == dir.path());
}

TEST_CASE("medleyvox: a metadata file shaped like the full dataset reproduces the published totals") {
  // Rows of the dataset table: category, singings, singers, song ids, segments, seconds.
  struct Row {
    Category category;
    int singings, singers, first_song, n_songs, segments;
    double seconds;
  };
  const std::vector<Row> rows = {
      {Category::kUnison, 2, 1, 0, 17, 190, 2006}, {Category::kUnison, 2, 2, 17, 2, 11, 64},
      {Category::kDuet, 2, 1, 0, 14, 61, 541},     {Category::kDuet, 2, 2, 12, 8, 55, 441},
      {Category::kMainVsRest, 3, 1, 9, 10, 46, 657}, {Category::kMainVsRest, 3, 2, 19, 1, 3, 55},
      {Category::kMainVsRest, 4, 1, 20, 3, 13, 148}, {Category::kMainVsRest, 5, 2, 20, 1, 1, 23},
      {Category::kMainVsRest, 6, 2, 21, 1, 1, 21},
  };
  TempDir dir;
  std::vector<std::string> lines;
  int counter = 0;
  for (const auto& r : rows) {
    const double each = r.seconds / r.segments;
    for (int i = 0; i < r.segments; ++i) {
      MedleyVoxSegment s;
      s.segment_id = "seg" + std::to_string(counter++);
      s.song_id = "song" + std::to_string(r.first_song + i % r.n_songs);
      s.category = r.category;
      s.n_singings = r.singings;
      s.n_singers = r.singers;
      s.start = 0.0;
      s.end = each;
      s.mixture_path = s.segment_id + "/mix.wav";
      if (r.category == Category::kMainVsRest) {
        s.stem_paths = {s.segment_id + "/main.wav", s.segment_id + "/rest.wav"};
        s.main_index = 0;
      } else {
        s.stem_paths = {s.segment_id + "/0.wav", s.segment_id + "/1.wav"};
      }
      lines.push_back(to_json_line(s));
    }
  }
  write_lines(dir.path() / "medleyvox.jsonl", lines);
  const auto meta = load_medleyvox_metadata(dir.path() / "medleyvox.jsonl");
  CHECK(meta.rejected.empty());
  const auto sum = summarize(meta.segments);
  CHECK(sum.per_category.at(Category::kUnison).segments == 201);
  CHECK(sum.per_category.at(Category::kDuet).segments == 116);
  CHECK(sum.per_category.at(Category::kMainVsRest).segments == 64);
  CHECK(sum.total.segments == 381);
  CHECK(sum.total.seconds == doctest::Approx(3956.0).epsilon(1e-9));
  CHECK(sum.per_category.at(Category::kUnison).seconds == doctest::Approx(2070.0));
  CHECK(sum.per_category.at(Category::kDuet).seconds == doctest::Approx(982.0));
  CHECK(sum.per_category.at(Category::kMainVsRest).seconds == doctest::Approx(904.0));
  CHECK(sum.per_category.at(Category::kUnison).songs.size() == 19);
  CHECK(sum.per_category.at(Category::kDuet).songs.size() == 20);
  CHECK(sum.per_category.at(Category::kMainVsRest).songs.size() == 14);
  CHECK(sum.total.songs.size() == 23);
  CHECK(sum.per_cell.at({Category::kMainVsRest, 4, 1}).segments == 13);
}
