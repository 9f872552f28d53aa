// include/medleysep/objectives/losses.h

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

#ifndef MEDLEYSEP_OBJECTIVES_LOSSES_H_
#define MEDLEYSEP_OBJECTIVES_LOSSES_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "medleysep/audio/audio_buffer.h"
#include "medleysep/audio/stft.h"

namespace medleysep {

// SI-SDR values are clamped to +-kSiSdrCapDb.
inline constexpr double kSiSdrCapDb = 200.0;
// Soft threshold of the bounded SNR; the value saturates at 10 log10(1/tau).
inline constexpr double kSnrTau = 1e-3;
inline constexpr double kStftLossEps = 1e-7;

// A scalar and, when requested, its gradient with respect to the estimate.
struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;  // empty unless requested
};

// All metric functions require equal lengths and a reference that is not
// all zero (std::invalid_argument otherwise).
double si_sdr(std::span<const double> est, std::span<const double> ref);
ValueGrad si_sdr_grad(std::span<const double> est, std::span<const double> ref);

double snr(std::span<const double> est, std::span<const double> ref);
ValueGrad snr_grad(std::span<const double> est, std::span<const double> ref);

// Sum over resolutions of spectral convergence plus mean log-magnitude L1.
double multi_res_stft_loss(std::span<const double> est, std::span<const double> ref,
                           std::span<const StftConfig> resolutions);
ValueGrad multi_res_stft_loss_grad(std::span<const double> est, std::span<const double> ref,
                                   std::span<const StftConfig> resolutions);

// Sum over resolutions of the mean absolute real/imaginary difference.
double ri_stft_loss(std::span<const double> est, std::span<const double> ref,
                    std::span<const StftConfig> resolutions);
ValueGrad ri_stft_loss_grad(std::span<const double> est, std::span<const double> ref,
                            std::span<const StftConfig> resolutions);

// Default resolutions (fft, hop, win): (512,128,512), (1024,256,1024), (2048,512,2048).
std::vector<StftConfig> default_loss_resolutions();

enum class TimeLoss { kSiSdr, kSnr };
std::string to_string(TimeLoss t);
TimeLoss time_loss_from_string(const std::string& name);

struct LossConfig {
  TimeLoss time_loss = TimeLoss::kSnr;
  std::vector<StftConfig> stft_resolutions = default_loss_resolutions();
  double time_weight = 1.0;
  double stft_mag_weight = 0.5;
  double stft_ri_weight = 0.5;
  bool apply_mixture_consistency = true;

  void validate() const;
};

// Loss for one (estimate, reference) pair; lower is better.
using PairLoss = std::function<ValueGrad(std::span<const double> est, std::span<const double> ref,
                                         bool want_grad)>;

// time_weight * (-time metric) + stft_mag_weight * multi-res + stft_ri_weight * ri.
PairLoss make_pair_loss(const LossConfig& config);
PairLoss negative_si_sdr_loss();
PairLoss negative_snr_loss();

// s_i <- s_i + (mixture - sum_j s_j) / N.
std::vector<std::vector<double>> mixture_consistency(const std::vector<std::vector<double>>& estimates,
                                                     std::span<const double> mixture);
std::vector<AudioBuffer> mixture_consistency(std::span<const AudioBuffer> estimates, const AudioBuffer& mixture);
// Gradient with respect to the unprojected estimates given gradients of the
// projected ones.
std::vector<std::vector<double>> mixture_consistency_adjoint(const std::vector<std::vector<double>>& grads);

struct PitResult {
  double loss = 0.0;
  // permutation[i] is the estimate assigned to reference i.
  std::vector<std::size_t> permutation;
  // Per-estimate gradients (indexed by estimate) when requested.
  std::vector<std::vector<double>> grads;
};

// Minimum over all assignments of the mean pairwise loss (N <= 4). Ties go to
// the lexicographically first permutation.
PitResult upit_loss(const std::vector<std::vector<double>>& estimates,
                    const std::vector<std::vector<double>>& references, const PairLoss& loss,
                    bool want_grad = false);

// Fixed main/rest assignment: mean of the two pair losses.
PitResult orpit_loss(std::span<const double> est_main, std::span<const double> est_rest,
                     std::span<const double> ref_main, std::span<const double> ref_rest_sum,
                     const PairLoss& loss, bool want_grad = false);

}  // namespace medleysep

#endif  // MEDLEYSEP_OBJECTIVES_LOSSES_H_
