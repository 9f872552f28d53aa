// src/audio/loudness.cpp

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

#include "medleysep/audio/loudness.h"

#include <cmath>

namespace medleysep {

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double loudness_db(std::span<const double> x) {
  return 20.0 * std::log10(rms(x) + kLoudnessEpsilon);
}

double gain_to_loudness(std::span<const double> x, double target_db) {
  const double r = rms(x);
  if (r <= 0.0) return 1.0;
  return std::pow(10.0, target_db / 20.0) / r;
}

}  // namespace medleysep
