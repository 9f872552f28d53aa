// src/separators/isrnet.cpp

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

#include "medleysep/separators/isrnet.h"

#include <cmath>
#include <stdexcept>

#include "medleysep/nn/ops.h"
#include "medleysep/separators/heuristic.h"

namespace medleysep {
namespace {

constexpr double kLevelFloor = 1e-8;

double bound(std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

}  // namespace

std::size_t ISRNetConfig::boundary() const { return boundary_bin(freq_boundary_hz, stft, sample_rate); }

void ISRNetConfig::validate() const {
  if (n_convnext_blocks < 1 || channels < 1 || expansion < 1 || n_sources < 1)
    throw std::invalid_argument("isrnet: sizes must be positive");
  if (kernel % 2 == 0) throw std::invalid_argument("isrnet: kernel must be odd");
  stft.validate();
  boundary();
}

ISRNet::ISRNet(const ISRNetConfig& config, std::uint64_t seed, const std::string& prefix)
    : nn::Module(prefix), config_(config) {
  config_.validate();
  boundary_ = config_.boundary();
  double energy = 0.0;
  for (double w : config_.stft.window_samples()) energy += w * w;
  window_norm_ = std::sqrt(energy);

  Rng rng = derive_rng(seed, {0x69737266ULL});
  const std::size_t C = config_.channels, K = config_.kernel, E = config_.expansion * C;
  const std::size_t in = 1 + 2 * config_.n_sources;
  stem_w_ = add_uniform("stem.weight", {C, in}, bound(in), rng);
  stem_b_ = add_uniform("stem.bias", {C}, bound(in), rng);
  for (std::size_t b = 0; b < config_.n_convnext_blocks; ++b) {
    const std::string p = "blocks." + std::to_string(b) + ".";
    Block blk;
    blk.dw_w = add_uniform(p + "depthwise.weight", {C, K, K}, bound(K * K), rng);
    blk.dw_b = add_uniform(p + "depthwise.bias", {C}, bound(K * K), rng);
    blk.norm_g = add_constant(p + "norm.gamma", {C}, 1.0);
    blk.norm_b = add_constant(p + "norm.beta", {C}, 0.0);
    blk.up_w = add_uniform(p + "expand.weight", {E, C}, bound(C), rng);
    blk.up_b = add_uniform(p + "expand.bias", {E}, bound(C), rng);
    blk.down_w = add_uniform(p + "project.weight", {C, E}, bound(E), rng);
    blk.down_b = add_uniform(p + "project.bias", {C}, bound(E), rng);
    blk.gamma = add_constant(p + "layer_scale", {C}, config_.layer_scale_init);
    blocks_.push_back(blk);
  }
  norm_g_ = add_constant("norm.gamma", {C}, 1.0);
  norm_b_ = add_constant("norm.beta", {C}, 0.0);
  head_w_ = add_constant("head.weight", {config_.n_sources, C}, 0.0);
  head_b_ = add_constant("head.bias", {config_.n_sources}, 0.0);
}

std::vector<nn::Var> ISRNet::refine(std::span<const double> mixture, const std::vector<nn::Var>& initial) const {
  using namespace nn;
  const std::size_t n = mixture.size(), S = config_.n_sources;
  if (initial.size() != S)
    throw std::invalid_argument("isrnet: expected " + std::to_string(S) + " initial estimates, got " +
                                std::to_string(initial.size()));
  for (const auto& e : initial)
    if (static_cast<std::size_t>(e->value.size()) != n)
      throw std::invalid_argument("isrnet: initial estimate length differs from the mixture");

  const Eigen::ArrayXd mix = Eigen::Map<const Eigen::ArrayXd>(mixture.data(), static_cast<Eigen::Index>(n));
  // Magnitudes are measured relative to the mixture level so the network is
  // loudness invariant.
  const double level = (std::sqrt(mix.square().mean()) + kLevelFloor) * window_norm_;
  const Var mix_spec = stft(constant(mix, {1, n}), config_.stft);
  const Var mix_mag = scale(magnitude(mix_spec), 1.0 / level);
  const std::size_t F = mix_mag->shape[0], T = mix_mag->shape[1];

  std::vector<Var> specs, mags;
  for (const auto& e : initial) {
    specs.push_back(stft(e, config_.stft));
    mags.push_back(reshape(scale(magnitude(specs.back()), 1.0 / level), {1, F, T}));
  }
  const Var est_mags = concat_channels(mags);
  const Var heur = heuristic_magnitudes(mix_mag->value, est_mags, boundary_);

  const Var feats = concat_channels({reshape(log1p(mix_mag), {1, F, T}), log1p(est_mags), log1p(heur)});
  Var x = conv1x1(feats, stem_w_, stem_b_);
  for (const auto& blk : blocks_) {
    Var h = channel_layer_norm(depthwise_conv2d(x, blk.dw_w, blk.dw_b), blk.norm_g, blk.norm_b);
    h = conv1x1(gelu(conv1x1(h, blk.up_w, blk.up_b)), blk.down_w, blk.down_b);
    x = add(x, channel_scale(h, blk.gamma));
  }
  const Var correction = conv1x1(channel_layer_norm(x, norm_g_, norm_b_), head_w_, head_b_);

  std::vector<Var> out;
  for (std::size_t s = 0; s < S; ++s) {
    const Var log_mag = add(log1p(slice_channels(est_mags, s, 1)), slice_channels(correction, s, 1));
    const Var refined = reshape(scale(relu(expm1(log_mag)), level), {F, T});
    out.push_back(istft(apply_phase(refined, specs[s]), config_.stft, n));
  }
  return out;
}

std::vector<AudioBuffer> ISRNet::refine(const AudioBuffer& mixture, std::span<const AudioBuffer> initial) const {
  nn::NoGradGuard guard;
  std::vector<nn::Var> vars;
  for (const auto& e : initial) {
    if (e.size() != mixture.size()) throw std::invalid_argument("isrnet: initial estimate length differs from the mixture");
    vars.push_back(nn::constant(Eigen::Map<const Eigen::ArrayXd>(e.samples().data(), static_cast<Eigen::Index>(e.size())),
                                {1, e.size()}));
  }
  std::vector<AudioBuffer> out;
  for (const auto& v : refine(mixture.samples(), vars))
    out.emplace_back(std::vector<double>(v->value.begin(), v->value.end()), mixture.sample_rate());
  return out;
}

SRNetStack::SRNetStack(const SRNetStackConfig& config, std::uint64_t seed, const std::string& prefix)
    : nn::Module(prefix) {
  if (config.kernel % 2 == 0) throw std::invalid_argument("srnet stack: kernel must be odd");
  Rng rng = derive_rng(seed, {0x73726e74ULL});
  const std::size_t K = config.kernel;
  std::vector<std::size_t> widths{config.in_channels};
  for (std::size_t i = 0; i <= config.hidden_layers; ++i) widths.push_back(config.channels);
  widths.push_back(config.out_channels);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const std::size_t fan = widths[i] * K * K;
    const std::string p = "conv." + std::to_string(i) + ".";
    layers_.emplace_back(add_uniform(p + "weight", {widths[i + 1], widths[i], K, K}, bound(fan), rng),
                         add_uniform(p + "bias", {widths[i + 1]}, bound(fan), rng));
  }
}

nn::Var SRNetStack::forward(const nn::Var& features) const {
  nn::Var x = features;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = nn::conv2d(x, layers_[i].first, layers_[i].second);
    if (i + 1 < layers_.size()) x = nn::relu(x);
  }
  return x;
}

}  // namespace medleysep
