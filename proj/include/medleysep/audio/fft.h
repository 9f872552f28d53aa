// include/medleysep/audio/fft.h

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

#ifndef MEDLEYSEP_AUDIO_FFT_H_
#define MEDLEYSEP_AUDIO_FFT_H_

#include <complex>
#include <span>

namespace medleysep {

// Real forward transform: out has n/2 + 1 bins, unnormalised.
void rfft(std::span<const double> in, std::span<std::complex<double>> out);

// Inverse of rfft, scaled by 1/n. Imaginary parts of DC and Nyquist are ignored.
void irfft(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace medleysep

#endif  // MEDLEYSEP_AUDIO_FFT_H_
