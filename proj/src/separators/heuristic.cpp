// src/separators/heuristic.cpp

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

#include "medleysep/separators/heuristic.h"

#include <cmath>
#include <stdexcept>

namespace medleysep {

std::size_t boundary_bin(double boundary_hz, const StftConfig& config, int sample_rate) {
  if (!(boundary_hz > 0.0) || sample_rate <= 0 || boundary_hz >= sample_rate / 2.0)
    throw std::invalid_argument("frequency boundary must lie strictly between 0 Hz and Nyquist");
  const auto bin = static_cast<std::size_t>(std::lround(boundary_hz * config.fft_size / sample_rate));
  if (bin == 0 || bin >= static_cast<std::size_t>(config.bins()))
    throw std::invalid_argument("frequency boundary maps outside the spectrogram bins");
  return bin;
}

std::vector<RealMask> heuristic_stft(const ComplexSpectrogram& mixture,
                                     std::span<const ComplexSpectrogram> initial_estimates, std::size_t boundary) {
  if (initial_estimates.empty()) throw std::invalid_argument("heuristic_stft: no estimates");
  for (const auto& e : initial_estimates)
    if (!e.same_shape(mixture)) throw std::invalid_argument("heuristic_stft: estimate and mixture shapes differ");
  const std::size_t T = mixture.frames(), F = mixture.bins(), S = initial_estimates.size();
  if (boundary == 0 || boundary >= F) throw std::invalid_argument("heuristic_stft: boundary bin outside (0, bins)");

  std::vector<RealMask> out(S, RealMask(T, F));
  std::vector<double> weight(S);
  for (std::size_t t = 0; t < T; ++t) {
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      weight[s] = 0.0;
      for (std::size_t f = 0; f < boundary; ++f) {
        const double m = std::abs(initial_estimates[s].at(t, f));
        out[s].at(t, f) = m;
        weight[s] += m;
      }
      total += weight[s];
    }
    for (std::size_t s = 0; s < S; ++s) {
      const double share = weight[s] / (total + kHeuristicEps);
      for (std::size_t f = boundary; f < F; ++f) out[s].at(t, f) = std::abs(mixture.at(t, f)) * share;
    }
  }
  return out;
}

nn::Var heuristic_magnitudes(const Eigen::ArrayXd& mixture_mag, const nn::Var& estimate_mags, std::size_t boundary) {
  if (estimate_mags->shape.size() != 3) throw std::invalid_argument("heuristic_magnitudes: expected [S, F, T]");
  const std::size_t S = estimate_mags->shape[0], F = estimate_mags->shape[1], T = estimate_mags->shape[2];
  if (static_cast<std::size_t>(mixture_mag.size()) != F * T)
    throw std::invalid_argument("heuristic_magnitudes: mixture shape differs from estimates");
  if (boundary == 0 || boundary >= F) throw std::invalid_argument("heuristic_magnitudes: boundary bin outside (0, bins)");

  const auto& M = estimate_mags->value;
  auto idx = [F, T](std::size_t s, std::size_t f, std::size_t t) { return (s * F + f) * T + t; };
  // weight[s * T + t] = low-band magnitude sum; total[t] = sum over sources.
  Eigen::ArrayXd weight = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(S * T));
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t f = 0; f < boundary; ++f)
      for (std::size_t t = 0; t < T; ++t) weight[s * T + t] += M[idx(s, f, t)];
  Eigen::ArrayXd total = Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(T), kHeuristicEps);
  for (std::size_t s = 0; s < S; ++s) total += weight.segment(s * T, T);

  Eigen::ArrayXd y(M.size());
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t t = 0; t < T; ++t)
        y[idx(s, f, t)] = f < boundary ? M[idx(s, f, t)] : mixture_mag[f * T + t] * weight[s * T + t] / total[t];

  return nn::make_result(estimate_mags->shape, std::move(y), {estimate_mags},
                         [ep = estimate_mags.get(), mixture_mag, weight, total, S, F, T, boundary, idx](nn::Node& self) {
    // A[s, t] = sum over the high band of grad * |X|.
    Eigen::ArrayXd A = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(S * T));
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t f = boundary; f < F; ++f)
        for (std::size_t t = 0; t < T; ++t) A[s * T + t] += self.grad[idx(s, f, t)] * mixture_mag[f * T + t];
    for (std::size_t t = 0; t < T; ++t) {
      double cross = 0.0;
      for (std::size_t s = 0; s < S; ++s) cross += A[s * T + t] * weight[s * T + t];
      cross /= total[t] * total[t];
      for (std::size_t s = 0; s < S; ++s) {
        const double dw = A[s * T + t] / total[t] - cross;
        for (std::size_t f = 0; f < boundary; ++f) ep->grad[idx(s, f, t)] += self.grad[idx(s, f, t)] + dw;
      }
    }
  });
}

}  // namespace medleysep
