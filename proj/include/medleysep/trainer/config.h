// include/medleysep/trainer/config.h

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

#ifndef MEDLEYSEP_TRAINER_CONFIG_H_
#define MEDLEYSEP_TRAINER_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medleysep/audio/stft.h"
#include "medleysep/mixer/mix_policy.h"
#include "medleysep/nn/adam.h"
#include "medleysep/objectives/losses.h"
#include "medleysep/separators/backbone.h"
#include "medleysep/separators/isrnet.h"

namespace medleysep {

// A training corpus and its sampling weight.
struct ManifestSpec {
  std::string path;
  double weight = 1.0;
};

// One task arm: every batch comes from a single arm.
struct DataArm {
  MixPolicy policy;
  double weight = 1.0;
};

struct TrainConfig {
  std::string name = "run";
  std::string runs_dir = "runs";
  std::uint64_t seed = 0;
  std::int64_t steps = 200000;
  std::size_t batch_size = 8;
  int sample_rate = 24000;

  std::vector<ManifestSpec> manifests;
  std::vector<DataArm> arms = default_arms();

  BackboneConfig backbone;
  LossConfig loss;
  nn::AdamConfig optimizer;
  double clip_norm = 5.0;
  // Learning rate is multiplied by plateau_factor after plateau_patience
  // evaluations without improvement, down to min_lr.
  int plateau_patience = 3;
  double plateau_factor = 0.5;
  double min_lr = 1e-6;

  std::int64_t log_every = 10;
  std::int64_t checkpoint_every = 1000;
  std::int64_t validate_every = 1000;  // 0 disables validation
  std::size_t validation_examples = 32;
  std::uint64_t validation_seed = 1234;

  std::size_t workers = 1;   // mixture construction threads
  std::size_t prefetch = 4;  // batches queued ahead of the optimiser

  // Joint refinement stage (finetune).
  std::optional<ISRNetConfig> isrnet;
  std::string backbone_checkpoint;
  double aux_weight = 0.0;  // loss on the backbone outputs
  bool freeze_backbone = false;

  // Checkpoint path to continue from, or "latest" for the newest one in the
  // run directory. Empty starts fresh.
  std::string resume;

  static std::vector<DataArm> default_arms();

  std::filesystem::path run_dir() const { return std::filesystem::path(runs_dir) / name; }
  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Every config maps to JSON with all fields present. Parsing starts from the
// defaults, rejects unknown keys and throws ConfigError with the field path.
nlohmann::json config_to_json(const StftConfig& c);
nlohmann::json config_to_json(const BackboneConfig& c);
nlohmann::json config_to_json(const ISRNetConfig& c);
nlohmann::json config_to_json(const LossConfig& c);
nlohmann::json config_to_json(const MixPolicy& c);
nlohmann::json config_to_json(const nn::AdamConfig& c);
nlohmann::json config_to_json(const TrainConfig& c);

void parse_config(const nlohmann::json& j, StftConfig& out, const std::string& where = "stft");
void parse_config(const nlohmann::json& j, BackboneConfig& out, const std::string& where = "backbone");
void parse_config(const nlohmann::json& j, ISRNetConfig& out, const std::string& where = "isrnet");
void parse_config(const nlohmann::json& j, LossConfig& out, const std::string& where = "loss");
void parse_config(const nlohmann::json& j, MixPolicy& out, const std::string& where = "policy");
void parse_config(const nlohmann::json& j, nn::AdamConfig& out, const std::string& where = "optimizer");
void parse_config(const nlohmann::json& j, TrainConfig& out, const std::string& where = "");

TrainConfig train_config_from_json(const nlohmann::json& j);

// Reads a JSON file; IoError when unreadable, ConfigError when malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace medleysep

#endif  // MEDLEYSEP_TRAINER_CONFIG_H_
