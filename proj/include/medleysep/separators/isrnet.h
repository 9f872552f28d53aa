// include/medleysep/separators/isrnet.h

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

#ifndef MEDLEYSEP_SEPARATORS_ISRNET_H_
#define MEDLEYSEP_SEPARATORS_ISRNET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/audio/stft.h"
#include "medleysep/nn/module.h"

namespace medleysep {

inline constexpr double kBoundaryChoicesHz[] = {1500.0, 3000.0, 4500.0, 6000.0};

struct ISRNetConfig {
  std::size_t n_convnext_blocks = 8;
  std::size_t channels = 48;
  double freq_boundary_hz = 3000.0;
  StftConfig stft = default_stft_config();
  int sample_rate = 24000;
  std::size_t n_sources = 2;
  std::size_t kernel = 7;
  std::size_t expansion = 4;
  double layer_scale_init = 0.1;

  std::size_t boundary() const;
  void validate() const;
};

// Refinement network: log-compressed mixture, estimate and heuristic
// magnitudes go through a stack of ConvNeXt-style blocks that predict a
// per-source log-magnitude correction. Refined magnitudes reuse the initial
// estimates' phase. The head starts at zero, so an untrained network passes
// the initial estimates through.
class ISRNet : public nn::Module {
 public:
  ISRNet(const ISRNetConfig& config, std::uint64_t seed, const std::string& prefix = "isrnet.");

  // mixture: samples of the input mixture; initial: [1, N] per source.
  std::vector<nn::Var> refine(std::span<const double> mixture, const std::vector<nn::Var>& initial) const;
  std::vector<AudioBuffer> refine(const AudioBuffer& mixture, std::span<const AudioBuffer> initial) const;

  const ISRNetConfig& config() const { return config_; }

 private:
  struct Block {
    nn::Var dw_w, dw_b, norm_g, norm_b, up_w, up_b, down_w, down_b, gamma;
  };

  ISRNetConfig config_;
  std::size_t boundary_ = 0;
  double window_norm_ = 1.0;
  nn::Var stem_w_, stem_b_;
  std::vector<Block> blocks_;
  nn::Var norm_g_, norm_b_, head_w_, head_b_;
};

// The unmodified super-resolution layer stack used as the size reference:
// plain 2-D convolutions with ReLU between them.
struct SRNetStackConfig {
  std::size_t in_channels = 5;
  std::size_t channels = 256;
  std::size_t hidden_layers = 4;
  std::size_t out_channels = 2;
  std::size_t kernel = 5;
};

class SRNetStack : public nn::Module {
 public:
  SRNetStack(const SRNetStackConfig& config, std::uint64_t seed, const std::string& prefix = "srnet.");
  // [in_channels, F, T] -> [out_channels, F, T].
  nn::Var forward(const nn::Var& features) const;

 private:
  std::vector<std::pair<nn::Var, nn::Var>> layers_;
};

}  // namespace medleysep

#endif  // MEDLEYSEP_SEPARATORS_ISRNET_H_
