// src/audio/resample.cpp

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

#include "medleysep/audio/resample.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace medleysep {
namespace {

constexpr double kZeroCrossings = 24.0;
constexpr double kRolloff = 0.95;
constexpr double kKaiserBeta = 8.6;
constexpr std::size_t kTableSize = 4096;

const std::array<double, kTableSize + 1>& kaiser_table() {
  static const auto table = [] {
    std::array<double, kTableSize + 1> t{};
    const double denom = std::cyl_bessel_i(0.0, kKaiserBeta);
    for (std::size_t i = 0; i <= kTableSize; ++i) {
      const double r = static_cast<double>(i) / kTableSize;
      t[i] = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    }
    return t;
  }();
  return table;
}

// Kaiser window at normalised distance r in [0, 1].
double kaiser(double r) {
  const auto& t = kaiser_table();
  const double pos = r * kTableSize;
  const auto i = static_cast<std::size_t>(pos);
  if (i >= kTableSize) return t[kTableSize];
  const double frac = pos - static_cast<double>(i);
  return t[i] + frac * (t[i + 1] - t[i]);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& x, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  const int source_rate = x.sample_rate();
  if (target_rate == source_rate) return x;

  const auto len = static_cast<std::int64_t>(x.size());
  const std::int64_t out_len =
      std::max<std::int64_t>(1, (len * target_rate + source_rate / 2) / source_rate);
  const double step = static_cast<double>(source_rate) / target_rate;
  // Cutoff in cycles per input sample.
  const double fc = 0.5 * std::min(1.0, 1.0 / step) * kRolloff;
  const double half_width = kZeroCrossings / (2.0 * fc);

  const auto in = x.samples();
  std::vector<double> out(static_cast<std::size_t>(out_len), 0.0);
  for (std::int64_t m = 0; m < out_len; ++m) {
    const double t = static_cast<double>(m) * step;
    const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::int64_t>(len - 1, static_cast<std::int64_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) {
      const double u = t - static_cast<double>(n);
      acc += in[static_cast<std::size_t>(n)] * 2.0 * fc * sinc(2.0 * fc * u) *
             kaiser(std::abs(u) / half_width);
    }
    out[static_cast<std::size_t>(m)] = acc;
  }
  return AudioBuffer(std::move(out), target_rate);
}

}  // namespace medleysep
