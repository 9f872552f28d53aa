// include/medleysep/separators/backbone.h

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

#ifndef MEDLEYSEP_SEPARATORS_BACKBONE_H_
#define MEDLEYSEP_SEPARATORS_BACKBONE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/audio/stft.h"
#include "medleysep/nn/module.h"

namespace medleysep {

enum class Basis { kLearnable, kStft };
std::string to_string(Basis b);
Basis basis_from_string(const std::string& name);

enum class ModelScale { kBase, kLarge };
std::string to_string(ModelScale s);
ModelScale model_scale_from_string(const std::string& name);

struct TcnConfig {
  std::size_t n_blocks = 8;
  std::size_t n_repeats = 3;
  std::size_t bottleneck_ch = 128;
  std::size_t conv_ch = 512;
  std::size_t kernel = 3;
};

struct BackboneConfig {
  Basis basis = Basis::kStft;
  std::size_t n_sources = 2;
  TcnConfig tcn;
  StftConfig stft = default_stft_config();
  ModelScale model_scale = ModelScale::kBase;
  int sample_rate = 24000;
  // Learnable basis only.
  std::size_t learnable_filters = 512;
  std::size_t learnable_kernel = 32;
  bool mixture_consistency = true;

  // Large scale doubles both channel counts.
  std::size_t bottleneck_channels() const;
  std::size_t conv_channels() const;
  // Shortest accepted input in samples.
  std::size_t min_length() const;
  void validate() const;
};

// Conv-TasNet separator. The STFT basis maps the stacked real/imaginary
// mixture spectrogram directly to per-source real/imaginary spectrograms;
// the learnable basis uses strided analysis filters, sigmoid masks and
// transposed synthesis filters.
class Backbone : public nn::Module {
 public:
  Backbone(const BackboneConfig& config, std::uint64_t seed, const std::string& prefix = "backbone.");

  // Builds the graph. Returns one [1, N] waveform per source.
  std::vector<nn::Var> forward(std::span<const double> mixture) const;
  // Inference without graph recording.
  std::vector<AudioBuffer> separate(const AudioBuffer& mixture) const;

  const BackboneConfig& config() const { return config_; }

 private:
  struct TcnBlock {
    nn::Var in_w, in_b, prelu1, norm1_g, norm1_b, dw_w, dw_b, prelu2, norm2_g, norm2_b, res_w, res_b, skip_w, skip_b;
    std::size_t dilation;
  };

  nn::Var separator(const nn::Var& features) const;

  BackboneConfig config_;
  double feature_scale_ = 1.0;
  nn::Var encoder_w_, decoder_w_;
  nn::Var in_norm_g_, in_norm_b_, bottleneck_w_, bottleneck_b_;
  std::vector<TcnBlock> blocks_;
  nn::Var out_prelu_, out_w_, out_b_;
};

}  // namespace medleysep

#endif  // MEDLEYSEP_SEPARATORS_BACKBONE_H_
