// tests/unit/test_support.h

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

#ifndef MEDLEYSEP_TESTS_TEST_SUPPORT_H_
#define MEDLEYSEP_TESTS_TEST_SUPPORT_H_

#include <complex>
#include <cstdint>
#include <functional>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/mixer/mixture.h"
#include "medleysep/nn/autograd.h"

namespace medleysep::testing {

std::vector<double> sine(double freq, int rate, std::size_t len, double amp = 1.0, double phase = 0.0);
std::vector<double> white_noise(std::size_t len, std::uint64_t seed, double amp = 1.0);

// Sum of bin-centred sines at bins [first_bin, first_bin + count) of an
// fft_size-point grid, amplitude 0.1 each, random phases.
AudioBuffer sine_cluster(int first_bin, int count, int fft_size, int rate, std::size_t len, std::uint64_t seed);

// Harmonic tone (f0 picked from the seed) over a light noise floor.
AudioBuffer voice_like(std::uint64_t seed, std::size_t len, int rate);

// Sung-note stand-in: ten harmonics with vibrato and a soft onset.
std::vector<double> vibrato_voice(double f0, double onset_seconds, std::size_t len, int rate, std::uint64_t seed);

// Fixed duets of a lower (120-220 Hz) and a higher (300-500 Hz) voice with
// random onsets; mixture == sum of the two sources.
std::vector<MixtureExample> toy_duets(std::size_t count, std::size_t len, int rate, std::uint64_t seed);

// Writes `count` vibrato-voice WAVs (singers i % 3, songs i % 2) plus a
// JSON Lines manifest into dir; returns the manifest path.
std::filesystem::path write_toy_corpus(const std::filesystem::path& dir, int count, int rate, double seconds);

// Writes `count` duet segments (mixture plus two stems each) and their
// evaluation metadata into dir; returns the metadata path.
std::filesystem::path write_toy_medleyvox(const std::filesystem::path& dir, int count, int rate, double seconds);

// Naive O(n^2) one-sided DFT; independent of the library FFT.
std::vector<std::complex<double>> direct_dft(std::span<const double> x);

// |DTFT| of x evaluated at an arbitrary frequency in Hz (brute-force sum).
double dtft_magnitude(std::span<const double> x, double freq, int rate);

// Frequency of the largest |DTFT| on a fine grid in [lo, hi] Hz.
double dtft_peak(std::span<const double> x, int rate, double lo, double hi, double step);

// Reference SI-SDR straight from the definition, in dB.
double reference_si_sdr(std::span<const double> est, std::span<const double> ref);

double max_abs_diff(std::span<const double> a, std::span<const double> b);

// Gaussian entries from a fixed seed.
Eigen::ArrayXd randn(std::size_t n, std::uint64_t seed, double scale = 1.0);

// Finite-difference check of d<c, f(inputs)>/d inputs for a random c, every
// input entry; returns the worst relative l2 error over the inputs.
double check_gradients(const std::function<nn::Var(const std::vector<nn::Var>&)>& f, std::vector<nn::Var> inputs,
                       std::uint64_t seed = 7);

// Creates a unique directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace medleysep::testing

#endif  // MEDLEYSEP_TESTS_TEST_SUPPORT_H_
