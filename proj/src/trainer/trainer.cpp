// src/trainer/trainer.cpp

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

#include "medleysep/trainer/trainer.h"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <thread>

#include <spdlog/spdlog.h>

#include "medleysep/common/error.h"
#include "medleysep/evaluation/metrics.h"
#include "medleysep/nn/ops.h"
#include "medleysep/objectives/losses.h"

namespace medleysep {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kMaxConsecutiveSkips = 3;
constexpr double kRunningLossDecay = 0.98;

std::vector<std::vector<double>> values_of(const std::vector<nn::Var>& vars) {
  std::vector<std::vector<double>> out;
  for (const auto& v : vars) out.emplace_back(v->value.data(), v->value.data() + v->value.size());
  return out;
}

std::vector<nn::Var> project(const std::vector<nn::Var>& estimates, const Eigen::ArrayXd& mixture) {
  const auto stacked = nn::mixture_consistency(nn::concat_channels(estimates), mixture);
  std::vector<nn::Var> out;
  for (std::size_t s = 0; s < estimates.size(); ++s) out.push_back(nn::slice_channels(stacked, s, 1));
  return out;
}

PitResult pit(Category category, const std::vector<std::vector<double>>& ests,
              const std::vector<std::vector<double>>& refs, const PairLoss& loss, bool want_grad) {
  if (category == Category::kMainVsRest) {
    if (ests.size() != 2 || refs.size() != 2)
      throw std::invalid_argument("main_vs_rest training needs two outputs and (main, rest) references");
    return orpit_loss(ests[0], ests[1], refs[0], refs[1], loss, want_grad);
  }
  return upit_loss(ests, refs, loss, want_grad);
}

void add_seeds(std::vector<std::pair<nn::Var, Eigen::ArrayXd>>& seeds, const std::vector<nn::Var>& outputs,
               const PitResult& r, double scale) {
  for (std::size_t e = 0; e < outputs.size(); ++e) {
    if (r.grads[e].empty()) continue;
    seeds.emplace_back(outputs[e], Eigen::Map<const Eigen::ArrayXd>(r.grads[e].data(),
                                                                   static_cast<Eigen::Index>(r.grads[e].size())) *
                                       scale);
  }
}

// Loss of one example; with want_grad, gradients (scaled by `scale`) are
// accumulated into the parameters unless the loss is non-finite.
double example_loss(const SeparatorModel& model, const MixtureExample& ex, const TrainConfig& config,
                    const PairLoss& loss, bool want_grad, double scale) {
  const auto& mix = ex.mixture.vec();
  const Eigen::ArrayXd mix_arr = Eigen::Map<const Eigen::ArrayXd>(mix.data(), static_cast<Eigen::Index>(mix.size()));
  std::vector<std::vector<double>> refs;
  for (const auto& s : ex.sources) refs.push_back(s.vec());

  std::vector<nn::Var> initial;
  {
    std::optional<nn::NoGradGuard> frozen;
    if (config.freeze_backbone || !want_grad) frozen.emplace();
    initial = model.backbone().forward(mix);
  }
  if (config.loss.apply_mixture_consistency) initial = project(initial, mix_arr);
  std::vector<nn::Var> final_out = initial;
  if (model.isrnet()) {
    final_out = model.isrnet()->refine(mix, initial);
    if (config.loss.apply_mixture_consistency) final_out = project(final_out, mix_arr);
  }

  const auto main = pit(ex.category, values_of(final_out), refs, loss, want_grad);
  double total = main.loss;
  std::vector<std::pair<nn::Var, Eigen::ArrayXd>> seeds;
  if (want_grad) add_seeds(seeds, final_out, main, scale);
  if (model.isrnet() && config.aux_weight > 0.0) {
    const auto aux = pit(ex.category, values_of(initial), refs, loss, want_grad && !config.freeze_backbone);
    total += config.aux_weight * aux.loss;
    if (want_grad && !config.freeze_backbone) add_seeds(seeds, initial, aux, scale * config.aux_weight);
  }
  if (want_grad && std::isfinite(total)) nn::backward(seeds);
  return total;
}

// Builds batches ahead of the optimiser on worker threads. Batches are pure
// functions of the step, so the output order and content do not depend on
// the worker count.
class Prefetcher {
 public:
  Prefetcher(const TrainingData& data, std::int64_t first, std::int64_t end, std::size_t workers,
             std::size_t capacity)
      : data_(data), next_claim_(first), next_take_(first), end_(end), capacity_(static_cast<std::int64_t>(capacity)) {
    if (workers > 1)
      for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
  }

  ~Prefetcher() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::vector<MixtureExample> next() {
    if (threads_.empty()) return data_.batch(next_take_++);
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return ready_.count(next_take_) > 0; });
    auto node = ready_.extract(next_take_++);
    lock.unlock();
    cv_.notify_all();
    if (node.mapped().error) std::rethrow_exception(node.mapped().error);
    return std::move(node.mapped().batch);
  }

 private:
  struct Slot {
    std::vector<MixtureExample> batch;
    std::exception_ptr error;
  };

  void work() {
    for (;;) {
      std::int64_t step;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return stop_ || (next_claim_ < end_ && next_claim_ < next_take_ + capacity_); });
        if (stop_) return;
        step = next_claim_++;
      }
      Slot slot;
      try {
        slot.batch = data_.batch(step);
      } catch (...) {
        slot.error = std::current_exception();
      }
      {
        std::lock_guard lock(mutex_);
        ready_.emplace(step, std::move(slot));
      }
      cv_.notify_all();
    }
  }

  const TrainingData& data_;
  std::int64_t next_claim_, next_take_, end_, capacity_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::int64_t, Slot> ready_;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

struct LoopState {
  std::int64_t step = 0;
  double running_loss = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> best_validation;
  int plateau_count = 0;
  // Without validation the plateau test uses the mean loss per log window.
  double window_sum = 0.0;
  std::int64_t window_count = 0;
  std::optional<double> best_window_loss;
};

json state_info(const LoopState& s, const nn::Adam& adam) {
  json info;
  info["running_loss"] = s.running_loss;
  info["lr_current"] = adam.lr();
  info["best_validation"] = s.best_validation ? json(*s.best_validation) : json(nullptr);
  info["plateau_count"] = s.plateau_count;
  info["best_window_loss"] = s.best_window_loss ? json(*s.best_window_loss) : json(nullptr);
  return info;
}

void restore_state(const nn::Checkpoint& ckpt, LoopState& s, nn::Adam& adam) {
  s.step = ckpt.step;
  const auto& info = ckpt.info;
  if (info.contains("running_loss") && info["running_loss"].is_number())
    s.running_loss = info["running_loss"].get<double>();
  if (info.contains("lr_current")) adam.set_lr(info["lr_current"].get<double>());
  if (info.contains("best_validation") && info["best_validation"].is_number())
    s.best_validation = info["best_validation"].get<double>();
  if (info.contains("plateau_count")) s.plateau_count = info["plateau_count"].get<int>();
  if (info.contains("best_window_loss") && info["best_window_loss"].is_number())
    s.best_window_loss = info["best_window_loss"].get<double>();
}

fs::path save_state(const fs::path& path, const TrainConfig& config, const SeparatorModel& model,
                    const nn::Adam& adam, const LoopState& s) {
  nn::Checkpoint ckpt;
  ckpt.config = config_to_json(config);
  ckpt.step = s.step;
  ckpt.info = state_info(s, adam);
  const auto params = model.parameters();
  nn::store_params(ckpt, params);
  nn::store_optimizer(ckpt, adam);
  nn::save_checkpoint(path, ckpt);
  return path;
}

fs::path step_path(const fs::path& run_dir, std::int64_t step) {
  return run_dir / ("step_" + std::to_string(step) + ".ckpt");
}

// Returns true (and resets the counter) when the learning rate was lowered.
bool plateau_update(LoopState& s, bool improved, const TrainConfig& config, nn::Adam& adam) {
  if (improved) {
    s.plateau_count = 0;
    return false;
  }
  if (++s.plateau_count < config.plateau_patience) return false;
  s.plateau_count = 0;
  if (adam.lr() <= config.min_lr) return false;
  adam.set_lr(std::max(adam.lr() * config.plateau_factor, config.min_lr));
  return true;
}

TrainResult run_loop(const TrainConfig& config, const TrainingData& data, SeparatorModel& model) {
  const fs::path run_dir = config.run_dir();
  try {
    fs::create_directories(run_dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(run_dir.string() + ": " + e.what());
  }

  std::vector<nn::NamedParam> trainable;
  if (config.freeze_backbone && model.isrnet()) {
    trainable = model.isrnet()->parameters();
  } else {
    trainable = model.parameters();
  }
  nn::Adam adam(trainable, config.optimizer);
  LoopState state;

  const bool resuming = !config.resume.empty();
  if (resuming) {
    fs::path path = config.resume;
    if (config.resume == "latest") {
      auto latest = latest_checkpoint(run_dir);
      if (!latest) throw ConfigError("resume: no checkpoint found in " + run_dir.string());
      path = *latest;
    }
    const auto ckpt = nn::load_checkpoint(path);
    const auto params = model.parameters();
    nn::restore_params(ckpt, params);
    nn::restore_optimizer(ckpt, adam);
    restore_state(ckpt, state, adam);
    spdlog::info("resumed from {} at step {}", path.string(), state.step);
  }

  write_text(run_dir / "config.json", config_to_json(config).dump(2) + "\n");
  const fs::path log_path = run_dir / "log.jsonl";
  std::ofstream log(log_path, resuming ? std::ios::app : std::ios::trunc);
  if (!log) throw IoError(log_path.string() + ": cannot open for writing");
  auto emit = [&](const json& j) {
    log << j.dump() << '\n';
    log.flush();
  };

  TrainResult result;
  result.run_dir = run_dir;
  result.best_validation = state.best_validation;
  if (config.steps == 0 && !resuming) {
    result.last_checkpoint = save_state(step_path(run_dir, 0), config, model, adam, state);
    return result;
  }

  const PairLoss loss = make_pair_loss(config.loss);
  std::optional<std::vector<MixtureExample>> validation_set;
  int consecutive_skips = 0;
  const auto t0 = std::chrono::steady_clock::now();
  Prefetcher prefetch(data, state.step, config.steps, config.workers, config.prefetch);

  while (state.step < config.steps) {
    if (stop_requested().load()) {
      result.interrupted = true;
      result.last_checkpoint = save_state(step_path(run_dir, state.step), config, model, adam, state);
      emit({{"step", state.step}, {"event", "interrupted"}});
      spdlog::warn("interrupted; checkpoint written to {}", result.last_checkpoint.string());
      break;
    }
    const auto batch = prefetch.next();
    if (batch.empty()) throw std::logic_error("training data produced an empty batch");
    adam.zero_grad();
    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& ex : batch) {
      total += example_loss(model, ex, config, loss, true, scale);
      if (!std::isfinite(total)) break;
    }
    const double step_loss = total * scale;
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(step_loss)) grad_norm = adam.clip_grad_norm(config.clip_norm);

    const std::int64_t k = state.step;
    const bool skipped = !std::isfinite(step_loss) || !std::isfinite(grad_norm);
    if (skipped) {
      adam.zero_grad();
      ++result.skipped_steps;
      result.losses.push_back(std::numeric_limits<double>::quiet_NaN());
      emit({{"step", k}, {"skipped", true}, {"loss", std::to_string(step_loss)},
            {"grad_norm", std::to_string(grad_norm)}});
      spdlog::warn("step {}: non-finite loss {} / grad norm {}; update skipped", k, step_loss, grad_norm);
      if (++consecutive_skips >= kMaxConsecutiveSkips) {
        throw TrainingAborted("aborting after " + std::to_string(consecutive_skips) +
                              " consecutive non-finite steps (last step " + std::to_string(k) +
                              ", loss " + std::to_string(step_loss) + ", grad norm " + std::to_string(grad_norm) +
                              ", lr " + std::to_string(adam.lr()) + ")");
      }
    } else {
      adam.step();
      consecutive_skips = 0;
      result.losses.push_back(step_loss);
      state.running_loss = std::isnan(state.running_loss)
                               ? step_loss
                               : kRunningLossDecay * state.running_loss + (1.0 - kRunningLossDecay) * step_loss;
      state.window_sum += step_loss;
      ++state.window_count;
      if (k % config.log_every == 0) {
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit({{"step", k},
              {"loss", step_loss},
              {"running_loss", state.running_loss},
              {"grad_norm", grad_norm},
              {"lr", adam.lr()},
              {"category", to_string(batch.front().category)},
              {"skipped", false},
              {"elapsed_s", elapsed}});
      }
    }
    state.step = k + 1;

    if (config.validate_every > 0 && state.step % config.validate_every == 0) {
      if (!validation_set) validation_set = data.validation();
      const double v = mean_si_sdr_improvement(model, *validation_set);
      const bool improved = !state.best_validation || v > *state.best_validation;
      if (improved) {
        state.best_validation = v;
        save_state(run_dir / "best.ckpt", config, model, adam, state);
      }
      const bool decayed = plateau_update(state, improved, config, adam);
      emit({{"step", state.step}, {"validation_si_sdr_i", v}, {"best", improved}, {"lr", adam.lr()}});
      if (decayed) spdlog::info("validation plateau: lr -> {}", adam.lr());
    } else if (config.validate_every == 0 && state.step % config.log_every == 0 && state.window_count > 0) {
      const double mean = state.window_sum / static_cast<double>(state.window_count);
      state.window_sum = 0.0;
      state.window_count = 0;
      const bool improved = !state.best_window_loss || mean < *state.best_window_loss;
      if (improved) state.best_window_loss = mean;
      if (plateau_update(state, improved, config, adam)) spdlog::info("loss plateau: lr -> {}", adam.lr());
    }

    if (state.step % config.checkpoint_every == 0 || state.step == config.steps)
      result.last_checkpoint = save_state(step_path(run_dir, state.step), config, model, adam, state);
  }
  result.steps_done = state.step;
  result.best_validation = state.best_validation;
  return result;
}

}  // namespace

DynamicData::DynamicData(const Manifest& manifest, const TrainConfig& config)
    : seed_(config.seed),
      batch_size_(config.batch_size),
      validation_seed_(config.validation_seed),
      validation_examples_(config.validation_examples) {
  auto cache = std::make_shared<AudioCache>(config.sample_rate);
  for (const auto& arm : config.arms) {
    mixers_.push_back(std::make_unique<DynamicMixer>(manifest, arm.policy, config.sample_rate, cache));
    weights_.push_back(arm.weight);
  }
}

std::size_t DynamicData::arm_of(std::int64_t step) const {
  if (mixers_.size() == 1) return 0;
  auto rng = derive_rng(seed_, {static_cast<std::uint64_t>(step), kArmStream});
  return std::discrete_distribution<std::size_t>(weights_.begin(), weights_.end())(rng);
}

std::vector<MixtureExample> DynamicData::batch(std::int64_t step) const {
  const auto& mixer = *mixers_[arm_of(step)];
  std::vector<MixtureExample> out;
  out.reserve(batch_size_);
  for (std::size_t i = 0; i < batch_size_; ++i) {
    auto rng = derive_rng(seed_, {static_cast<std::uint64_t>(step), i});
    out.push_back(mixer.draw(rng));
  }
  return out;
}

std::vector<MixtureExample> DynamicData::validation() const {
  std::vector<MixtureExample> out;
  for (std::size_t i = 0; i < validation_examples_; ++i) {
    auto rng = derive_rng(validation_seed_, {i});
    const std::size_t arm =
        mixers_.size() == 1 ? 0 : std::discrete_distribution<std::size_t>(weights_.begin(), weights_.end())(rng);
    out.push_back(mixers_[arm]->draw(rng));
  }
  return out;
}

FixedData::FixedData(std::vector<MixtureExample> examples, std::size_t batch_size,
                     std::vector<MixtureExample> validation)
    : examples_(std::move(examples)), validation_(std::move(validation)), batch_size_(batch_size) {
  if (examples_.empty()) throw std::invalid_argument("FixedData: no examples");
  if (batch_size_ == 0) throw std::invalid_argument("FixedData: batch size must be positive");
  if (validation_.empty()) validation_ = examples_;
}

std::vector<MixtureExample> FixedData::batch(std::int64_t step) const {
  std::vector<MixtureExample> out;
  const std::size_t n = examples_.size();
  for (std::size_t i = 0; i < batch_size_; ++i)
    out.push_back(examples_[(static_cast<std::size_t>(step) * batch_size_ + i) % n]);
  return out;
}

std::vector<MixtureExample> FixedData::validation() const { return validation_; }

Manifest load_training_manifests(const TrainConfig& config) {
  if (config.manifests.empty()) throw ConfigError("missing config field manifests");
  std::vector<Manifest> parts;
  std::vector<double> weights;
  for (const auto& m : config.manifests) {
    parts.push_back(load_manifest(m.path));
    weights.push_back(m.weight);
  }
  return parts.size() == 1 ? std::move(parts.front()) : Manifest::merge(parts, weights);
}

SeparatorModel::SeparatorModel(const BackboneConfig& backbone, std::optional<ISRNetConfig> isrnet,
                               std::uint64_t seed)
    : backbone_(std::make_unique<Backbone>(backbone, seed)) {
  if (isrnet) isrnet_ = std::make_unique<ISRNet>(*isrnet, seed + 1);
}

std::vector<nn::NamedParam> SeparatorModel::parameters() const {
  auto out = backbone_->parameters();
  if (isrnet_)
    for (const auto& p : isrnet_->parameters()) out.push_back(p);
  return out;
}

std::vector<AudioBuffer> SeparatorModel::separate(const AudioBuffer& mixture) const {
  auto initial = backbone_->separate(mixture);
  if (!isrnet_) return initial;
  return isrnet_->refine(mixture, initial);
}

std::vector<AudioBuffer> SeparatorModel::separate_initial(const AudioBuffer& mixture) const {
  return backbone_->separate(mixture);
}

json SeparatorModel::config_json() const {
  return {{"backbone", config_to_json(backbone_->config())},
          {"isrnet", isrnet_ ? config_to_json(isrnet_->config()) : json(nullptr)}};
}

SeparatorModel load_model(const nn::Checkpoint& ckpt) {
  if (!ckpt.config.contains("backbone")) throw ConfigError("checkpoint config has no backbone section");
  BackboneConfig backbone;
  parse_config(ckpt.config["backbone"], backbone, "backbone");
  std::optional<ISRNetConfig> isrnet;
  if (ckpt.config.contains("isrnet") && !ckpt.config["isrnet"].is_null()) {
    ISRNetConfig c;
    parse_config(ckpt.config["isrnet"], c, "isrnet");
    isrnet = c;
  }
  SeparatorModel model(backbone, isrnet, 0);
  const auto params = model.parameters();
  nn::restore_params(ckpt, params);
  return model;
}

SeparatorModel load_model(const fs::path& checkpoint_path) { return load_model(nn::load_checkpoint(checkpoint_path)); }

double mean_si_sdr_improvement(const SeparatorModel& model, const std::vector<MixtureExample>& examples,
                               bool initial_only) {
  if (examples.empty()) throw std::invalid_argument("mean_si_sdr_improvement: no examples");
  double total = 0.0;
  for (const auto& ex : examples) {
    const auto out = initial_only ? model.separate_initial(ex.mixture) : model.separate(ex.mixture);
    std::vector<std::vector<double>> ests, refs;
    for (const auto& o : out) ests.push_back(o.vec());
    for (const auto& s : ex.sources) refs.push_back(s.vec());
    std::vector<std::size_t> perm(refs.size());
    std::iota(perm.begin(), perm.end(), 0);
    if (ex.category != Category::kMainVsRest) perm = best_si_sdr_permutation(ests, refs);
    const auto s = score_separation(ests, refs, ex.mixture.samples(), perm, false);
    double mean = 0.0;
    for (double v : s.si_sdr_i) mean += v;
    total += mean / static_cast<double>(s.si_sdr_i.size());
  }
  return total / static_cast<double>(examples.size());
}

std::atomic<bool>& stop_requested() {
  static std::atomic<bool> flag{false};
  return flag;
}

TrainResult train(const TrainConfig& config, const TrainingData& data) {
  config.validate();
  SeparatorModel model(config.backbone, config.isrnet, config.seed);
  return run_loop(config, data, model);
}

TrainResult joint_finetune(TrainConfig config, const TrainingData& data) {
  if (!config.isrnet) throw ConfigError("missing config field isrnet");
  if (config.backbone_checkpoint.empty()) throw ConfigError("missing config field backbone_checkpoint");
  const auto ckpt = nn::load_checkpoint(config.backbone_checkpoint);
  if (!ckpt.config.contains("backbone")) throw ConfigError("backbone_checkpoint: no backbone config recorded");
  parse_config(ckpt.config["backbone"], config.backbone, "backbone_checkpoint.backbone");
  config.validate();
  SeparatorModel model(config.backbone, config.isrnet, config.seed);
  try {
    nn::restore_params(ckpt, model.backbone().parameters());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("backbone_checkpoint: ") + e.what());
  }
  return run_loop(config, data, model);
}

std::optional<fs::path> latest_checkpoint(const fs::path& run_dir) {
  static const std::regex pattern(R"(step_(\d+)\.ckpt)");
  std::optional<fs::path> best;
  std::int64_t best_step = -1;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(run_dir, ec)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const std::int64_t step = std::stoll(m[1].str());
    if (step > best_step) {
      best_step = step;
      best = entry.path();
    }
  }
  return best;
}

}  // namespace medleysep
