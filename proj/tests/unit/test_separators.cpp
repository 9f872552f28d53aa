// tests/unit/test_separators.cpp

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

#include <cmath>
#include <random>

#include "medleysep/nn/ops.h"
#include "medleysep/separators/backbone.h"
#include "medleysep/separators/heuristic.h"
#include "medleysep/separators/isrnet.h"
#include "test_support.h"

using namespace medleysep;
using namespace medleysep::testing;

namespace {

constexpr int kRate = 16000;

StftConfig toy_stft() {
  StftConfig c;
  c.fft_size = 256;
  c.win_size = 256;
  c.hop_size = 64;
  return c;
}

BackboneConfig toy_backbone(Basis basis = Basis::kStft) {
  BackboneConfig c;
  c.basis = basis;
  c.stft = toy_stft();
  c.sample_rate = kRate;
  c.tcn = {3, 1, 16, 32, 3};
  c.learnable_filters = 32;
  c.learnable_kernel = 16;
  return c;
}

ISRNetConfig toy_isrnet() {
  ISRNetConfig c;
  c.stft = toy_stft();
  c.sample_rate = kRate;
  c.channels = 6;
  c.n_convnext_blocks = 2;
  c.kernel = 3;
  return c;
}

ComplexSpectrogram random_spec(std::size_t frames, std::size_t fft, std::uint64_t seed, double scale = 1.0) {
  StftConfig c;
  c.fft_size = c.win_size = static_cast<int>(fft);
  c.hop_size = static_cast<int>(fft / 4);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, scale);
  ComplexSpectrogram s(frames, c, kRate);
  for (auto& v : s.data()) v = {n(gen), n(gen)};
  return s;
}

AudioBuffer noise(std::size_t n, std::uint64_t seed, double amp = 0.1) {
  return AudioBuffer(white_noise(n, seed, amp), kRate);
}

}  // namespace

TEST_CASE("backbone: shape contract for both bases") {
  for (auto basis : {Basis::kStft, Basis::kLearnable}) {
    Backbone model(toy_backbone(basis), 1);
    for (std::size_t n : {std::size_t{300}, std::size_t{4001}}) {
      const auto mix = noise(n, 2);
      const auto out = model.separate(mix);
      REQUIRE(out.size() == 2);
      for (const auto& o : out) {
        CHECK(o.size() == n);
        for (double v : o.samples()) REQUIRE(std::isfinite(v));
      }
    }
  }
}

TEST_CASE("backbone: mixture consistency makes estimates sum to the input") {
  Backbone model(toy_backbone(), 3);
  const auto mix = noise(3000, 4, 0.3);
  const auto out = model.separate(mix);
  double worst = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) worst = std::max(worst, std::abs(out[0][i] + out[1][i] - mix[i]));
  CHECK(worst <= 1e-6 * mix.peak());
}

TEST_CASE("backbone: silence in, near silence out") {
  for (auto basis : {Basis::kStft, Basis::kLearnable}) {
    auto cfg = toy_backbone(basis);
    cfg.mixture_consistency = false;
    Backbone model(cfg, 5);
    const auto out = model.separate(AudioBuffer::zeros(2000, kRate));
    for (const auto& o : out) CHECK(o.peak() < 1e-6);
  }
}

TEST_CASE("backbone: too-short input names the minimum") {
  Backbone model(toy_backbone(), 6);
  try {
    model.separate(noise(100, 7));
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("256") != std::string::npos);
  }
}

TEST_CASE("backbone: large scale doubles channels and construction is seeded") {
  auto cfg = toy_backbone();
  Backbone base(cfg, 8);
  cfg.model_scale = ModelScale::kLarge;
  Backbone large(cfg, 8);
  CHECK(large.config().bottleneck_channels() == 2 * base.config().bottleneck_channels());
  CHECK(nn::count_params(large) > nn::count_params(base));
  Backbone again(toy_backbone(), 8);
  for (std::size_t i = 0; i < base.parameters().size(); ++i)
    CHECK((base.parameters()[i].var->value == again.parameters()[i].var->value).all());
}

TEST_CASE("backbone: gradients reach every parameter") {
  for (auto basis : {Basis::kStft, Basis::kLearnable}) {
    Backbone model(toy_backbone(basis), 9);
    model.zero_grad();
    const auto mix = white_noise(1500, 10, 0.2);
    const auto out = model.forward(mix);
    std::vector<std::pair<nn::Var, Eigen::ArrayXd>> seeds;
    for (std::size_t s = 0; s < out.size(); ++s) seeds.emplace_back(out[s], randn(1500, 11 + s));
    nn::backward(seeds);
    for (const auto& p : model.parameters()) CHECK_MESSAGE(p.var->grad.matrix().norm() > 0.0, p.name);
  }
}

TEST_CASE("backbone: end-to-end input gradient matches finite differences") {
  auto cfg = toy_backbone();
  cfg.tcn = {2, 1, 4, 6, 3};
  cfg.stft.fft_size = cfg.stft.win_size = 32;
  cfg.stft.hop_size = 8;
  Backbone model(cfg, 12);
  // Perturb a parameter through the full graph: first-layer weight.
  const auto& target = model.parameters()[2];
  const auto mix = white_noise(96, 13, 0.5);
  auto f = [&](const std::vector<nn::Var>&) { return nn::concat_channels(model.forward(mix)); };
  CHECK(check_gradients(f, {target.var}) < 1e-5);
}

TEST_CASE("heuristic_stft: routing, symmetry and silence") {
  const std::size_t T = 5, fft = 32, F = fft / 2 + 1, boundary = 6;
  const auto X = random_spec(T, fft, 20);
  auto E1 = random_spec(T, fft, 21), E2 = random_spec(T, fft, 22);
  for (std::size_t f = 0; f < F; ++f) E2.at(0, f) = 0.0;  // frame 0: only source 1 active
  for (std::size_t f = 0; f < boundary; ++f) E2.at(1, f) = E1.at(1, f);  // frame 1: equal weights
  for (std::size_t f = 0; f < F; ++f) E1.at(2, f) = E2.at(2, f) = 0.0;  // frame 2: silent estimates
  const std::vector<ComplexSpectrogram> est{E1, E2};
  const auto H = heuristic_stft(X, est, boundary);
  for (std::size_t f = boundary; f < F; ++f) {
    CHECK(H[0].at(0, f) == doctest::Approx(std::abs(X.at(0, f))).epsilon(1e-8));
    CHECK(H[1].at(0, f) == 0.0);
    CHECK(H[0].at(1, f) == doctest::Approx(std::abs(X.at(1, f)) / 2).epsilon(1e-8));
    CHECK(H[1].at(1, f) == doctest::Approx(std::abs(X.at(1, f)) / 2).epsilon(1e-8));
    CHECK(H[0].at(2, f) == 0.0);
    CHECK(H[1].at(2, f) == 0.0);
  }
  for (std::size_t f = 0; f < boundary; ++f) CHECK(H[0].at(3, f) == std::abs(E1.at(3, f)));
  CHECK_THROWS_AS(heuristic_stft(X, est, 0), std::invalid_argument);
  CHECK_THROWS_AS(heuristic_stft(X, est, F), std::invalid_argument);
}

TEST_CASE("heuristic_stft: bounded by the mixture on random inputs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto X = random_spec(4, 64, 100 + seed);
    const std::vector<ComplexSpectrogram> est{random_spec(4, 64, 300 + seed, 0.5), random_spec(4, 64, 500 + seed, 2.0)};
    const auto H = heuristic_stft(X, est, 10);
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t f = 10; f < X.bins(); ++f) {
        const double sum = H[0].at(t, f) + H[1].at(t, f);
        REQUIRE(H[0].at(t, f) >= 0.0);
        REQUIRE(sum <= std::abs(X.at(t, f)) + kHeuristicEps);
      }
  }
}

TEST_CASE("heuristic op agrees with the spectrogram form and differentiates") {
  const std::size_t T = 4, fft = 32, F = fft / 2 + 1, boundary = 5;
  const auto X = random_spec(T, fft, 40);
  const std::vector<ComplexSpectrogram> est{random_spec(T, fft, 41), random_spec(T, fft, 42)};
  const auto H = heuristic_stft(X, est, boundary);
  Eigen::ArrayXd mix(F * T), mags(2 * F * T);
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t t = 0; t < T; ++t) {
      mix[f * T + t] = std::abs(X.at(t, f));
      for (std::size_t s = 0; s < 2; ++s) mags[(s * F + f) * T + t] = std::abs(est[s].at(t, f));
    }
  const auto var = nn::leaf(mags, {2, F, T}, true);
  const auto out = heuristic_magnitudes(mix, var, boundary);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t t = 0; t < T; ++t)
        CHECK(out->value[(s * F + f) * T + t] == doctest::Approx(H[s].at(t, f)).epsilon(1e-12));
  CHECK(check_gradients([&](const auto& v) { return heuristic_magnitudes(mix, v[0], boundary); }, {var}) < 1e-6);
}

TEST_CASE("boundary bins") {
  StftConfig c;
  c.fft_size = c.win_size = 1024;
  c.hop_size = 256;
  CHECK(boundary_bin(3000, c, 24000) == 128);
  CHECK(boundary_bin(1500, c, 24000) == 64);
  CHECK_THROWS_AS(boundary_bin(12000, c, 24000), std::invalid_argument);
  CHECK_THROWS_AS(boundary_bin(0, c, 24000), std::invalid_argument);
}

TEST_CASE("isrnet: untrained network passes estimates through") {
  ISRNet net(toy_isrnet(), 50);
  const auto mix = noise(3000, 51);
  const std::vector<AudioBuffer> initial{noise(3000, 52, 0.05), noise(3000, 53, 0.07)};
  const auto out = net.refine(mix, initial);
  REQUIRE(out.size() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(out[s].size() == mix.size());
    CHECK(max_abs_diff(out[s].samples(), initial[s].samples()) < 1e-9);
  }
  CHECK_THROWS_AS(net.refine(mix, std::vector<AudioBuffer>{initial[0]}), std::invalid_argument);
  const std::vector<AudioBuffer> short_est{noise(2000, 54), noise(2000, 55)};
  CHECK_THROWS_AS(net.refine(mix, short_est), std::invalid_argument);
}

TEST_CASE("isrnet: finite outputs with random weights") {
  ISRNet net(toy_isrnet(), 56);
  std::mt19937_64 gen(57);
  std::normal_distribution<double> n(0.0, 0.3);
  for (const auto& p : net.parameters())
    for (auto& v : p.var->value) v += n(gen);
  const auto out = net.refine(noise(2500, 58), std::vector<AudioBuffer>{noise(2500, 59), noise(2500, 60)});
  for (const auto& o : out) {
    CHECK(o.size() == 2500);
    for (double v : o.samples()) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("joint backbone + isrnet: gradients reach every parameter") {
  Backbone backbone(toy_backbone(), 61);
  ISRNet net(toy_isrnet(), 62);
  // Move the zero-initialized head off zero so gradients also flow through
  // the blocks.
  for (const auto& p : net.parameters())
    if (p.name.find("head") != std::string::npos) p.var->value.setConstant(0.05);
  backbone.zero_grad();
  net.zero_grad();
  const auto mix = white_noise(2000, 63, 0.2);
  const auto refined = net.refine(mix, backbone.forward(mix));
  std::vector<std::pair<nn::Var, Eigen::ArrayXd>> seeds;
  for (std::size_t s = 0; s < refined.size(); ++s) seeds.emplace_back(refined[s], randn(2000, 64 + s));
  nn::backward(seeds);
  for (const auto* m : {static_cast<const nn::Module*>(&backbone), static_cast<const nn::Module*>(&net)})
    for (const auto& p : m->parameters()) CHECK_MESSAGE(p.var->grad.matrix().norm() > 0.0, p.name);
}

TEST_CASE("parameter counts: iSRNet reference config vs SRNet-style stack") {
  const ISRNetConfig ref;
  ISRNet net(ref, 70);
  const auto small = nn::count_params(net);
  CHECK(small >= 120000);
  CHECK(small <= 200000);
  SRNetStack stack({}, 71);
  const auto big = nn::count_params(stack);
  CHECK(big > 6000000);
  CHECK(static_cast<double>(big) / static_cast<double>(small) >= 30.0);

  auto wide = ref;
  wide.channels *= 2;
  ISRNet wider(wide, 72);
  CHECK(nn::count_params(wider) > 2 * small);
}

TEST_CASE("SRNet stack forward shape") {
  SRNetStackConfig cfg;
  cfg.channels = 4;
  cfg.hidden_layers = 1;
  SRNetStack stack(cfg, 80);
  const auto y = stack.forward(nn::constant(randn(5 * 9 * 7, 81), {5, 9, 7}));
  CHECK(y->shape == nn::Shape{2, 9, 7});
}
