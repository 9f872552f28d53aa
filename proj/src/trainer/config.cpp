// src/trainer/config.cpp

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

#include "medleysep/trainer/config.h"

#include <fstream>
#include <sstream>

#include "medleysep/common/error.h"
#include "medleysep/common/json_config.h"

namespace medleysep {
namespace {

using nlohmann::json;

template <typename Fn>
void rethrow_as_config(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError((where.empty() ? std::string("config") : where) + ": " + e.what());
  }
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

}  // namespace

std::vector<DataArm> TrainConfig::default_arms() {
  DataArm duet, unison;
  duet.policy.category = Category::kDuet;
  unison.policy.category = Category::kUnison;
  return {duet, unison};
}

void TrainConfig::validate() const {
  if (name.empty()) throw ConfigError("name: must not be empty");
  if (steps < 0) throw ConfigError("steps: must be non-negative");
  if (batch_size == 0) throw ConfigError("batch_size: must be positive");
  if (!is_pipeline_rate(sample_rate)) throw ConfigError("sample_rate: not a supported pipeline rate");
  if (backbone.sample_rate != sample_rate) throw ConfigError("backbone.sample_rate: differs from sample_rate");
  if (arms.empty()) throw ConfigError("arms: at least one task arm is required");
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::string where = "arms[" + std::to_string(i) + "]";
    if (!(arms[i].weight > 0.0)) throw ConfigError(where + ".weight: must be positive");
    rethrow_as_config(where + ".policy", [&] { arms[i].policy.validate(); });
  }
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    const std::string where = "manifests[" + std::to_string(i) + "]";
    if (manifests[i].path.empty()) throw ConfigError(where + ".path: missing");
    if (!(manifests[i].weight > 0.0)) throw ConfigError(where + ".weight: must be positive");
  }
  rethrow_as_config("backbone", [&] { backbone.validate(); });
  rethrow_as_config("loss", [&] { loss.validate(); });
  if (!(optimizer.lr > 0.0)) throw ConfigError("optimizer.lr: must be positive");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm: must be positive");
  if (plateau_patience < 1) throw ConfigError("plateau_patience: must be at least 1");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) throw ConfigError("plateau_factor: must lie in (0, 1)");
  if (min_lr < 0.0) throw ConfigError("min_lr: must be non-negative");
  if (log_every < 1) throw ConfigError("log_every: must be at least 1");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every: must be at least 1");
  if (validate_every < 0) throw ConfigError("validate_every: must be non-negative");
  if (validate_every > 0 && validation_examples == 0)
    throw ConfigError("validation_examples: must be positive when validating");
  if (workers == 0) throw ConfigError("workers: must be positive");
  if (prefetch == 0) throw ConfigError("prefetch: must be positive");
  if (aux_weight < 0.0) throw ConfigError("aux_weight: must be non-negative");
  if (isrnet) {
    rethrow_as_config("isrnet", [&] { isrnet->validate(); });
    if (isrnet->sample_rate != backbone.sample_rate)
      throw ConfigError("isrnet.sample_rate: differs from the backbone rate");
    if (isrnet->n_sources != backbone.n_sources)
      throw ConfigError("isrnet.n_sources: differs from the backbone source count");
  } else if (freeze_backbone) {
    throw ConfigError("freeze_backbone: only meaningful with an isrnet section");
  }
}

json config_to_json(const StftConfig& c) {
  return {{"fft_size", c.fft_size},
          {"win_size", c.win_size},
          {"hop_size", c.hop_size},
          {"window", to_string(c.window)},
          {"center_pad", c.center_pad}};
}

void parse_config(const json& j, StftConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get("fft_size", out.fft_size);
  r.get("win_size", out.win_size);
  r.get("hop_size", out.hop_size);
  r.get_as("window", out.window, window_from_string);
  r.get("center_pad", out.center_pad);
  r.finish();
}

json config_to_json(const BackboneConfig& c) {
  return {{"basis", to_string(c.basis)},
          {"n_sources", c.n_sources},
          {"tcn",
           {{"n_blocks", c.tcn.n_blocks},
            {"n_repeats", c.tcn.n_repeats},
            {"bottleneck_ch", c.tcn.bottleneck_ch},
            {"conv_ch", c.tcn.conv_ch},
            {"kernel", c.tcn.kernel}}},
          {"stft", config_to_json(c.stft)},
          {"model_scale", to_string(c.model_scale)},
          {"sample_rate", c.sample_rate},
          {"learnable_filters", c.learnable_filters},
          {"learnable_kernel", c.learnable_kernel},
          {"mixture_consistency", c.mixture_consistency}};
}

void parse_config(const json& j, BackboneConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get_as("basis", out.basis, basis_from_string);
  r.get("n_sources", out.n_sources);
  if (r.has("tcn")) {
    ConfigReader t(r.raw("tcn"), join(where, "tcn"));
    t.get("n_blocks", out.tcn.n_blocks);
    t.get("n_repeats", out.tcn.n_repeats);
    t.get("bottleneck_ch", out.tcn.bottleneck_ch);
    t.get("conv_ch", out.tcn.conv_ch);
    t.get("kernel", out.tcn.kernel);
    t.finish();
  }
  if (r.has("stft")) parse_config(r.raw("stft"), out.stft, join(where, "stft"));
  r.get_as("model_scale", out.model_scale, model_scale_from_string);
  r.get("sample_rate", out.sample_rate);
  r.get("learnable_filters", out.learnable_filters);
  r.get("learnable_kernel", out.learnable_kernel);
  r.get("mixture_consistency", out.mixture_consistency);
  r.finish();
}

json config_to_json(const ISRNetConfig& c) {
  return {{"n_convnext_blocks", c.n_convnext_blocks},
          {"channels", c.channels},
          {"freq_boundary_hz", c.freq_boundary_hz},
          {"stft", config_to_json(c.stft)},
          {"sample_rate", c.sample_rate},
          {"n_sources", c.n_sources},
          {"kernel", c.kernel},
          {"expansion", c.expansion},
          {"layer_scale_init", c.layer_scale_init}};
}

void parse_config(const json& j, ISRNetConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get("n_convnext_blocks", out.n_convnext_blocks);
  r.get("channels", out.channels);
  r.get("freq_boundary_hz", out.freq_boundary_hz);
  if (r.has("stft")) parse_config(r.raw("stft"), out.stft, join(where, "stft"));
  r.get("sample_rate", out.sample_rate);
  r.get("n_sources", out.n_sources);
  r.get("kernel", out.kernel);
  r.get("expansion", out.expansion);
  r.get("layer_scale_init", out.layer_scale_init);
  r.finish();
}

json config_to_json(const LossConfig& c) {
  json res = json::array();
  for (const auto& s : c.stft_resolutions) res.push_back({s.fft_size, s.hop_size, s.win_size});
  return {{"time_loss", to_string(c.time_loss)},
          {"stft_resolutions", res},
          {"time_weight", c.time_weight},
          {"stft_mag_weight", c.stft_mag_weight},
          {"stft_ri_weight", c.stft_ri_weight},
          {"apply_mixture_consistency", c.apply_mixture_consistency}};
}

void parse_config(const json& j, LossConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get_as("time_loss", out.time_loss, time_loss_from_string);
  if (r.has("stft_resolutions")) {
    std::vector<std::array<int, 3>> triples;
    r.get("stft_resolutions", triples);
    out.stft_resolutions.clear();
    for (const auto& [fft, hop, win] : triples) {
      StftConfig s;
      s.fft_size = fft;
      s.hop_size = hop;
      s.win_size = win;
      out.stft_resolutions.push_back(s);
    }
  }
  r.get("time_weight", out.time_weight);
  r.get("stft_mag_weight", out.stft_mag_weight);
  r.get("stft_ri_weight", out.stft_ri_weight);
  r.get("apply_mixture_consistency", out.apply_mixture_consistency);
  r.finish();
}

json config_to_json(const MixPolicy& c) {
  return {{"category", to_string(c.category)},
          {"p_same_singer", c.p_same_singer},
          {"p_same_song", c.p_same_song},
          {"p_speech", c.p_speech},
          {"n_rest_range", c.n_rest_range},
          {"detune_cents_range", c.detune_cents_range},
          {"octave_choices", c.octave_choices},
          {"formant_ratio_range", c.formant_ratio_range},
          {"gain_range_db", c.gain_range_db},
          {"main_margin_db", c.main_margin_db},
          {"chunk_seconds", c.chunk_seconds},
          {"normalize_db", c.normalize_db}};
}

void parse_config(const json& j, MixPolicy& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get_as("category", out.category, category_from_string);
  r.get("p_same_singer", out.p_same_singer);
  r.get("p_same_song", out.p_same_song);
  r.get("p_speech", out.p_speech);
  r.get("n_rest_range", out.n_rest_range);
  r.get("detune_cents_range", out.detune_cents_range);
  r.get("octave_choices", out.octave_choices);
  r.get("formant_ratio_range", out.formant_ratio_range);
  r.get("gain_range_db", out.gain_range_db);
  r.get("main_margin_db", out.main_margin_db);
  r.get("chunk_seconds", out.chunk_seconds);
  r.get("normalize_db", out.normalize_db);
  r.finish();
}

json config_to_json(const nn::AdamConfig& c) {
  return {{"lr", c.lr}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"eps", c.eps}, {"weight_decay", c.weight_decay}};
}

void parse_config(const json& j, nn::AdamConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get("lr", out.lr);
  r.get("beta1", out.beta1);
  r.get("beta2", out.beta2);
  r.get("eps", out.eps);
  r.get("weight_decay", out.weight_decay);
  r.finish();
}

json config_to_json(const TrainConfig& c) {
  json manifests = json::array();
  for (const auto& m : c.manifests) manifests.push_back({{"path", m.path}, {"weight", m.weight}});
  json arms = json::array();
  for (const auto& a : c.arms) arms.push_back({{"weight", a.weight}, {"policy", config_to_json(a.policy)}});
  return {{"name", c.name},
          {"runs_dir", c.runs_dir},
          {"seed", c.seed},
          {"steps", c.steps},
          {"batch_size", c.batch_size},
          {"sample_rate", c.sample_rate},
          {"manifests", manifests},
          {"arms", arms},
          {"backbone", config_to_json(c.backbone)},
          {"loss", config_to_json(c.loss)},
          {"optimizer", config_to_json(c.optimizer)},
          {"clip_norm", c.clip_norm},
          {"plateau_patience", c.plateau_patience},
          {"plateau_factor", c.plateau_factor},
          {"min_lr", c.min_lr},
          {"log_every", c.log_every},
          {"checkpoint_every", c.checkpoint_every},
          {"validate_every", c.validate_every},
          {"validation_examples", c.validation_examples},
          {"validation_seed", c.validation_seed},
          {"workers", c.workers},
          {"prefetch", c.prefetch},
          {"isrnet", c.isrnet ? config_to_json(*c.isrnet) : json(nullptr)},
          {"backbone_checkpoint", c.backbone_checkpoint},
          {"aux_weight", c.aux_weight},
          {"freeze_backbone", c.freeze_backbone},
          {"resume", c.resume}};
}

void parse_config(const json& j, TrainConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get("name", out.name);
  r.get("runs_dir", out.runs_dir);
  r.get("seed", out.seed);
  r.get("steps", out.steps);
  r.get("batch_size", out.batch_size);
  r.get("sample_rate", out.sample_rate);
  if (r.has("manifests")) {
    const auto& arr = r.raw("manifests");
    if (!arr.is_array()) throw ConfigError(r.field("manifests") + ": expected an array");
    out.manifests.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string w = r.field("manifests[" + std::to_string(i) + "]");
      ManifestSpec m;
      if (arr[i].is_string()) {
        m.path = arr[i].get<std::string>();
      } else {
        ConfigReader mr(arr[i], w);
        if (!arr[i].contains("path")) throw ConfigError("missing config field " + w + ".path");
        mr.get("path", m.path);
        mr.get("weight", m.weight);
        mr.finish();
      }
      out.manifests.push_back(m);
    }
  }
  if (r.has("arms")) {
    const auto& arr = r.raw("arms");
    if (!arr.is_array()) throw ConfigError(r.field("arms") + ": expected an array");
    out.arms.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string w = r.field("arms[" + std::to_string(i) + "]");
      ConfigReader ar(arr[i], w);
      DataArm a;
      ar.get("weight", a.weight);
      if (ar.has("policy")) parse_config(ar.raw("policy"), a.policy, w + ".policy");
      ar.finish();
      out.arms.push_back(a);
    }
  }
  // Sub-model rates follow the top-level rate unless set explicitly.
  out.backbone.sample_rate = out.sample_rate;
  if (r.has("backbone")) parse_config(r.raw("backbone"), out.backbone, r.field("backbone"));
  if (r.has("loss")) parse_config(r.raw("loss"), out.loss, r.field("loss"));
  if (r.has("optimizer")) parse_config(r.raw("optimizer"), out.optimizer, r.field("optimizer"));
  r.get("clip_norm", out.clip_norm);
  r.get("plateau_patience", out.plateau_patience);
  r.get("plateau_factor", out.plateau_factor);
  r.get("min_lr", out.min_lr);
  r.get("log_every", out.log_every);
  r.get("checkpoint_every", out.checkpoint_every);
  r.get("validate_every", out.validate_every);
  r.get("validation_examples", out.validation_examples);
  r.get("validation_seed", out.validation_seed);
  r.get("workers", out.workers);
  r.get("prefetch", out.prefetch);
  if (r.has("isrnet")) {
    ISRNetConfig isr;
    isr.sample_rate = out.sample_rate;
    parse_config(r.raw("isrnet"), isr, r.field("isrnet"));
    out.isrnet = isr;
  } else {
    r.allow("isrnet");  // explicit null
  }
  r.get("backbone_checkpoint", out.backbone_checkpoint);
  r.get("aux_weight", out.aux_weight);
  r.get("freeze_backbone", out.freeze_backbone);
  r.get("resume", out.resume);
  r.finish();
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  parse_config(j, c, "");
  c.validate();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace medleysep
