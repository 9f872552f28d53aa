// include/medleysep/nn/ops.h

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

#ifndef MEDLEYSEP_NN_OPS_H_
#define MEDLEYSEP_NN_OPS_H_

#include <vector>

#include "medleysep/audio/stft.h"
#include "medleysep/nn/autograd.h"

namespace medleysep::nn {

// Layouts: 1-D feature maps are [C, T], 2-D maps are [C, F, T], waveforms
// are [1, N] and spectrograms are [2F, T] (real rows then imaginary rows).

// y = W x + b over the channel axis. w: [Cout, Cin], b: [Cout] or null.
Var conv1x1(const Var& x, const Var& w, const Var& b);
// Per-channel dilated convolution with "same" zero padding. w: [C, K] (K odd).
Var depthwise_conv1d(const Var& x, const Var& w, const Var& b, std::size_t dilation);
// Per-channel 2-D convolution with "same" padding. x: [C, F, T], w: [C, KF, KT] (odd).
Var depthwise_conv2d(const Var& x, const Var& w, const Var& b);
// Dense 2-D convolution with "same" padding. w: [Cout, Cin, KF, KT].
Var conv2d(const Var& x, const Var& w, const Var& b);

Var relu(const Var& x);
Var prelu(const Var& x, const Var& slope);  // slope: [1]
Var gelu(const Var& x);
Var sigmoid(const Var& x);
Var log1p(const Var& x);
Var expm1(const Var& x);

// Normalization over every element (gamma/beta per channel).
Var global_layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-8);
// Normalization across channels at each position.
Var channel_layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-6);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double s);
// Multiplies channel c by g[c].
Var channel_scale(const Var& x, const Var& g);
Var sum_all(const Var& x);
Var mean_square(const Var& x);

Var concat_channels(const std::vector<Var>& parts);
Var slice_channels(const Var& x, std::size_t begin, std::size_t count);
Var reshape(const Var& x, Shape shape);

// Waveform [1, N] to spectrogram [2F, T] and back.
Var stft(const Var& x, const StftConfig& config);
Var istft(const Var& spec, const StftConfig& config, std::size_t out_len);
// |z| per bin: [2F, T] -> [F, T]. Zero bins pass no gradient.
Var magnitude(const Var& spec);
// mag * z / |z|, where z is the reference spectrogram; zero bins use phase 0.
Var apply_phase(const Var& mag, const Var& reference);

// Frames [1, N] into [L, T] with the given hop (zero padded at the end) and
// the overlap-add adjoint back to [1, out_len].
Var frame_signal(const Var& x, std::size_t frame, std::size_t hop);
Var overlap_add(const Var& frames, std::size_t hop, std::size_t out_len);
std::size_t frame_count(std::size_t length, std::size_t frame, std::size_t hop);

// Sources [S, N] shifted so their sum equals the mixture [N] (constant).
Var mixture_consistency(const Var& estimates, const Eigen::ArrayXd& mixture);

}  // namespace medleysep::nn

#endif  // MEDLEYSEP_NN_OPS_H_
