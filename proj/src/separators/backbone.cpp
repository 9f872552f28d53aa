// src/separators/backbone.cpp

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

#include "medleysep/separators/backbone.h"

#include <cmath>
#include <stdexcept>

#include "medleysep/audio/loudness.h"
#include "medleysep/nn/ops.h"

namespace medleysep {
namespace {

constexpr double kNormFloor = 1e-8;

double fan_in_bound(std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

}  // namespace

std::string to_string(Basis b) { return b == Basis::kStft ? "stft" : "learnable"; }

Basis basis_from_string(const std::string& name) {
  if (name == "stft") return Basis::kStft;
  if (name == "learnable") return Basis::kLearnable;
  throw std::invalid_argument("unknown basis '" + name + "' (expected stft or learnable)");
}

std::string to_string(ModelScale s) { return s == ModelScale::kBase ? "base" : "large"; }

ModelScale model_scale_from_string(const std::string& name) {
  if (name == "base") return ModelScale::kBase;
  if (name == "large") return ModelScale::kLarge;
  throw std::invalid_argument("unknown model scale '" + name + "' (expected base or large)");
}

std::size_t BackboneConfig::bottleneck_channels() const {
  return tcn.bottleneck_ch * (model_scale == ModelScale::kLarge ? 2 : 1);
}

std::size_t BackboneConfig::conv_channels() const { return tcn.conv_ch * (model_scale == ModelScale::kLarge ? 2 : 1); }

std::size_t BackboneConfig::min_length() const {
  return basis == Basis::kStft ? static_cast<std::size_t>(stft.win_size) : learnable_kernel;
}

void BackboneConfig::validate() const {
  if (n_sources < 1) throw std::invalid_argument("backbone: n_sources must be positive");
  if (tcn.n_blocks < 1 || tcn.n_repeats < 1 || tcn.bottleneck_ch < 1 || tcn.conv_ch < 1)
    throw std::invalid_argument("backbone: TCN sizes must be positive");
  if (tcn.kernel % 2 == 0) throw std::invalid_argument("backbone: TCN kernel must be odd");
  if (sample_rate <= 0) throw std::invalid_argument("backbone: sample_rate must be positive");
  stft.validate();
  if (basis == Basis::kLearnable && (learnable_kernel < 2 || learnable_kernel % 2 != 0 || learnable_filters < 1))
    throw std::invalid_argument("backbone: learnable kernel must be even and >= 2");
}

Backbone::Backbone(const BackboneConfig& config, std::uint64_t seed, const std::string& prefix)
    : nn::Module(prefix), config_(config) {
  config_.validate();
  Rng rng = derive_rng(seed, {0x6261636bULL});
  const std::size_t B = config_.bottleneck_channels(), H = config_.conv_channels(), K = config_.tcn.kernel;
  const std::size_t S = config_.n_sources;

  std::size_t feat = 0, out = 0;
  if (config_.basis == Basis::kStft) {
    const std::size_t F = static_cast<std::size_t>(config_.stft.bins());
    feat = 2 * F;
    out = S * 2 * F;
    double energy = 0.0;
    for (double w : config_.stft.window_samples()) energy += w * w;
    feature_scale_ = std::sqrt(energy);
  } else {
    const std::size_t N = config_.learnable_filters, L = config_.learnable_kernel;
    encoder_w_ = add_uniform("encoder.weight", {N, L}, fan_in_bound(L), rng);
    decoder_w_ = add_uniform("decoder.weight", {L, N}, fan_in_bound(N), rng);
    feat = N;
    out = S * N;
  }
  in_norm_g_ = add_constant("input_norm.gamma", {feat}, 1.0);
  in_norm_b_ = add_constant("input_norm.beta", {feat}, 0.0);
  bottleneck_w_ = add_uniform("bottleneck.weight", {B, feat}, fan_in_bound(feat), rng);
  bottleneck_b_ = add_uniform("bottleneck.bias", {B}, fan_in_bound(feat), rng);

  for (std::size_t r = 0; r < config_.tcn.n_repeats; ++r)
    for (std::size_t b = 0; b < config_.tcn.n_blocks; ++b) {
      const std::string p = "tcn." + std::to_string(r) + "." + std::to_string(b) + ".";
      TcnBlock blk;
      blk.dilation = std::size_t{1} << b;
      blk.in_w = add_uniform(p + "in.weight", {H, B}, fan_in_bound(B), rng);
      blk.in_b = add_uniform(p + "in.bias", {H}, fan_in_bound(B), rng);
      blk.prelu1 = add_constant(p + "prelu1", {1}, 0.25);
      blk.norm1_g = add_constant(p + "norm1.gamma", {H}, 1.0);
      blk.norm1_b = add_constant(p + "norm1.beta", {H}, 0.0);
      blk.dw_w = add_uniform(p + "depthwise.weight", {H, K}, fan_in_bound(K), rng);
      blk.dw_b = add_uniform(p + "depthwise.bias", {H}, fan_in_bound(K), rng);
      blk.prelu2 = add_constant(p + "prelu2", {1}, 0.25);
      blk.norm2_g = add_constant(p + "norm2.gamma", {H}, 1.0);
      blk.norm2_b = add_constant(p + "norm2.beta", {H}, 0.0);
      // The last block only feeds the skip path.
      const bool last = r + 1 == config_.tcn.n_repeats && b + 1 == config_.tcn.n_blocks;
      if (!last) {
        blk.res_w = add_uniform(p + "residual.weight", {B, H}, fan_in_bound(H), rng);
        blk.res_b = add_uniform(p + "residual.bias", {B}, fan_in_bound(H), rng);
      }
      blk.skip_w = add_uniform(p + "skip.weight", {B, H}, fan_in_bound(H), rng);
      blk.skip_b = add_uniform(p + "skip.bias", {B}, fan_in_bound(H), rng);
      blocks_.push_back(blk);
    }
  out_prelu_ = add_constant("output.prelu", {1}, 0.25);
  out_w_ = add_uniform("output.weight", {out, B}, fan_in_bound(B), rng);
  out_b_ = add_uniform("output.bias", {out}, fan_in_bound(B), rng);
}

nn::Var Backbone::separator(const nn::Var& features) const {
  using namespace nn;
  Var x = conv1x1(global_layer_norm(features, in_norm_g_, in_norm_b_), bottleneck_w_, bottleneck_b_);
  Var skip_sum;
  for (const auto& blk : blocks_) {
    Var h = global_layer_norm(prelu(conv1x1(x, blk.in_w, blk.in_b), blk.prelu1), blk.norm1_g, blk.norm1_b);
    h = global_layer_norm(prelu(depthwise_conv1d(h, blk.dw_w, blk.dw_b, blk.dilation), blk.prelu2), blk.norm2_g,
                          blk.norm2_b);
    if (blk.res_w) x = add(x, conv1x1(h, blk.res_w, blk.res_b));
    Var skip = conv1x1(h, blk.skip_w, blk.skip_b);
    skip_sum = skip_sum ? add(skip_sum, skip) : skip;
  }
  return conv1x1(prelu(skip_sum, out_prelu_), out_w_, out_b_);
}

std::vector<nn::Var> Backbone::forward(std::span<const double> mixture) const {
  using namespace nn;
  const std::size_t n = mixture.size();
  if (n < config_.min_length())
    throw std::invalid_argument("backbone: input has " + std::to_string(n) + " samples, minimum is " +
                                std::to_string(config_.min_length()));
  const Eigen::ArrayXd mix = Eigen::Map<const Eigen::ArrayXd>(mixture.data(), static_cast<Eigen::Index>(n));
  const double level = std::sqrt(mix.square().mean()) + kNormFloor;
  const Var x = constant(mix / level, {1, n});
  const std::size_t S = config_.n_sources;

  std::vector<Var> waves;
  if (config_.basis == Basis::kStft) {
    const std::size_t F = static_cast<std::size_t>(config_.stft.bins());
    const Var spec = scale(stft(x, config_.stft), 1.0 / feature_scale_);
    const Var est = scale(separator(spec), feature_scale_);
    for (std::size_t s = 0; s < S; ++s) waves.push_back(istft(slice_channels(est, s * 2 * F, 2 * F), config_.stft, n));
  } else {
    const std::size_t N = config_.learnable_filters, L = config_.learnable_kernel, hop = L / 2;
    const Var enc = relu(conv1x1(frame_signal(x, L, hop), encoder_w_, nullptr));
    const Var masks = sigmoid(separator(enc));
    for (std::size_t s = 0; s < S; ++s) {
      const Var frames = conv1x1(mul(slice_channels(masks, s * N, N), enc), decoder_w_, nullptr);
      waves.push_back(overlap_add(frames, hop, n));
    }
  }
  Var stacked = scale(concat_channels(waves), level);
  if (config_.mixture_consistency) stacked = mixture_consistency(stacked, mix);
  std::vector<Var> out;
  for (std::size_t s = 0; s < S; ++s) out.push_back(slice_channels(stacked, s, 1));
  return out;
}

std::vector<AudioBuffer> Backbone::separate(const AudioBuffer& mixture) const {
  nn::NoGradGuard guard;
  std::vector<AudioBuffer> out;
  for (const auto& v : forward(mixture.samples()))
    out.emplace_back(std::vector<double>(v->value.begin(), v->value.end()), mixture.sample_rate());
  return out;
}

}  // namespace medleysep
