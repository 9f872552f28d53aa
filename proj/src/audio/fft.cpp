// src/audio/fft.cpp

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

#include "medleysep/audio/fft.h"

#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace medleysep {
namespace {

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

}  // namespace

void rfft(std::span<const double> in, std::span<std::complex<double>> out) {
  const auto n = static_cast<Eigen::Index>(in.size());
  if (n % 2 != 0 || out.size() != in.size() / 2 + 1)
    throw std::invalid_argument("rfft: even length and n/2+1 output bins required");
  engine().fwd(out.data(), in.data(), n);
}

void irfft(std::span<const std::complex<double>> in, std::span<double> out) {
  const auto n = static_cast<Eigen::Index>(out.size());
  if (n % 2 != 0 || in.size() != out.size() / 2 + 1)
    throw std::invalid_argument("irfft: even length and n/2+1 input bins required");
  engine().inv(out.data(), in.data(), n);
}

}  // namespace medleysep
