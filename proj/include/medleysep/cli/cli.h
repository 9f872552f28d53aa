// include/medleysep/cli/cli.h

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

#ifndef MEDLEYSEP_CLI_CLI_H_
#define MEDLEYSEP_CLI_CLI_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "medleysep/audio/stft.h"
#include "medleysep/audio/wav.h"
#include "medleysep/evaluation/evaluate.h"
#include "medleysep/mixer/mix_policy.h"
#include "medleysep/trainer/config.h"

namespace medleysep {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;   // bad flags, config values or missing fields
inline constexpr int kExitIo = 2;       // unreadable/unwritable files, malformed data files
inline constexpr int kExitRuntime = 3;  // training aborted or other failures

// Offline mixture materialization.
struct MixJobConfig {
  std::vector<ManifestSpec> manifests;
  MixPolicy policy;
  int sample_rate = 24000;
  std::size_t n_examples = 100;
  std::uint64_t seed = 0;
  std::string out = "mixtures";
  WavFormat format = WavFormat::kFloat32;
  std::size_t workers = 1;

  void validate() const;
};

// Model or oracle evaluation on MedleyVox-style metadata.
struct EvalJobConfig {
  std::string metadata;
  std::string checkpoint;  // eval only
  std::string oracle;      // oracle only: ibm, irm or cirm
  StftConfig stft;         // oracle analysis
  std::string out = "eval";
  EvalOptions options;
  // Overrides the refinement network's frequency boundary when > 0.
  double boundary_hz = 0.0;

  void validate(bool needs_checkpoint, bool needs_oracle) const;
};

nlohmann::json config_to_json(const MixJobConfig& c);
nlohmann::json config_to_json(const EvalJobConfig& c);
nlohmann::json config_to_json(const EvalOptions& c);
void parse_config(const nlohmann::json& j, MixJobConfig& out, const std::string& where = "");
void parse_config(const nlohmann::json& j, EvalJobConfig& out, const std::string& where = "");
void parse_config(const nlohmann::json& j, EvalOptions& out, const std::string& where = "options");

// Entry point shared by the executable and the tests. Subcommands: mix,
// train, finetune, eval, oracle, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace medleysep

#endif  // MEDLEYSEP_CLI_CLI_H_
