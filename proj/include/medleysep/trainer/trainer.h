// include/medleysep/trainer/trainer.h

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

#ifndef MEDLEYSEP_TRAINER_TRAINER_H_
#define MEDLEYSEP_TRAINER_TRAINER_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medleysep/corpus/manifest.h"
#include "medleysep/mixer/dynamic_mixer.h"
#include "medleysep/mixer/mixture.h"
#include "medleysep/nn/checkpoint.h"
#include "medleysep/separators/backbone.h"
#include "medleysep/separators/isrnet.h"
#include "medleysep/trainer/config.h"

namespace medleysep {

// Training examples as a pure function of the step index.
class TrainingData {
 public:
  virtual ~TrainingData() = default;
  virtual std::vector<MixtureExample> batch(std::int64_t step) const = 0;
  // Held-out examples for model selection; identical on every call.
  virtual std::vector<MixtureExample> validation() const = 0;
};

// Fresh dynamic mixtures every step. The arm of step t comes from
// derive_rng(seed, {t, kArmStream}); example i from derive_rng(seed, {t, i}).
class DynamicData : public TrainingData {
 public:
  static constexpr std::uint64_t kArmStream = 0xA4A4A4A4ULL;

  DynamicData(const Manifest& manifest, const TrainConfig& config);

  std::vector<MixtureExample> batch(std::int64_t step) const override;
  std::vector<MixtureExample> validation() const override;
  std::size_t arm_of(std::int64_t step) const;

 private:
  std::vector<std::unique_ptr<DynamicMixer>> mixers_;
  std::vector<double> weights_;
  std::uint64_t seed_;
  std::size_t batch_size_;
  std::uint64_t validation_seed_;
  std::size_t validation_examples_;
};

// A fixed example set, cycled in order (toy runs and overfitting checks).
// Validation uses the same examples unless a separate set is given.
class FixedData : public TrainingData {
 public:
  FixedData(std::vector<MixtureExample> examples, std::size_t batch_size,
            std::vector<MixtureExample> validation = {});

  std::vector<MixtureExample> batch(std::int64_t step) const override;
  std::vector<MixtureExample> validation() const override;

 private:
  std::vector<MixtureExample> examples_;
  std::vector<MixtureExample> validation_;
  std::size_t batch_size_;
};

// Loads and merges the configured manifests. ConfigError when none are set.
Manifest load_training_manifests(const TrainConfig& config);

// Backbone plus optional refinement network.
class SeparatorModel {
 public:
  SeparatorModel(const BackboneConfig& backbone, std::optional<ISRNetConfig> isrnet, std::uint64_t seed);

  Backbone& backbone() { return *backbone_; }
  const Backbone& backbone() const { return *backbone_; }
  const ISRNet* isrnet() const { return isrnet_.get(); }

  std::vector<nn::NamedParam> parameters() const;
  // Final outputs (refined when a refinement network is present).
  std::vector<AudioBuffer> separate(const AudioBuffer& mixture) const;
  // Backbone outputs only.
  std::vector<AudioBuffer> separate_initial(const AudioBuffer& mixture) const;

  nlohmann::json config_json() const;

 private:
  std::unique_ptr<Backbone> backbone_;
  std::unique_ptr<ISRNet> isrnet_;
};

// Rebuilds the model recorded in a checkpoint (config echo + parameters).
SeparatorModel load_model(const nn::Checkpoint& ckpt);
SeparatorModel load_model(const std::filesystem::path& checkpoint_path);

// Mean SI-SDR improvement of the final outputs: best permutation for
// unison/duet, fixed (main, rest) order for main_vs_rest.
double mean_si_sdr_improvement(const SeparatorModel& model, const std::vector<MixtureExample>& examples,
                               bool initial_only = false);

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  std::filesystem::path run_dir;
  std::int64_t steps_done = 0;
  std::filesystem::path last_checkpoint;
  std::optional<double> best_validation;
  bool interrupted = false;
  std::size_t skipped_steps = 0;
  std::vector<double> losses;  // per executed step, NaN for skipped steps
};

// Set from a signal handler to request checkpoint-and-exit.
std::atomic<bool>& stop_requested();

// Runs the configured step budget. Writes config.json, log.jsonl,
// step_<k>.ckpt files and best.ckpt under config.run_dir(). When
// config.isrnet is set, backbone and refinement network train jointly.
TrainResult train(const TrainConfig& config, const TrainingData& data);

// Joint stage: restores the backbone from config.backbone_checkpoint (its
// recorded backbone config wins), then trains with the refinement network.
// Incompatible checkpoints fail before any step.
TrainResult joint_finetune(TrainConfig config, const TrainingData& data);

// Newest step_<k>.ckpt in a run directory, if any.
std::optional<std::filesystem::path> latest_checkpoint(const std::filesystem::path& run_dir);

}  // namespace medleysep

#endif  // MEDLEYSEP_TRAINER_TRAINER_H_
