// include/medleysep/evaluation/metrics.h

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

#ifndef MEDLEYSEP_EVALUATION_METRICS_H_
#define MEDLEYSEP_EVALUATION_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "medleysep/audio/audio_buffer.h"

namespace medleysep {

inline constexpr std::size_t kBssTaps = 512;
// Relative to the reference energy.
inline constexpr double kBssRidge = 1e-9;

struct SdrResult {
  double value = 0.0;        // dB, clamped like SI-SDR
  bool regularized = false;  // the projection system needed a ridge
  std::size_t taps = 0;      // filter length actually used
};

// Least-squares projection onto delayed copies (0..taps-1) of one
// reference. The normal equations are factored once so several estimates can
// be scored against the same reference.
class TargetProjector {
 public:
  TargetProjector(std::span<const double> reference, std::size_t taps = kBssTaps);

  // est must have the reference length.
  SdrResult sdr(std::span<const double> est) const;

  std::size_t taps() const { return taps_; }

 private:
  std::vector<double> reference_;
  std::size_t taps_;
  Eigen::LDLT<Eigen::MatrixXd> solver_;
  bool regularized_ = false;
};

// Time-invariant BSS-eval SDR of `est` for refs[target]: the target component
// is est projected onto the target's delayed span, everything else counts as
// distortion. Segments shorter than `taps` use their own length.
SdrResult bss_sdr(std::span<const double> est, const std::vector<std::vector<double>>& refs, std::size_t target,
                  std::size_t taps = kBssTaps);

enum class Metric { kSdr, kSiSdr };

std::string to_string(Metric m);

double score(Metric metric, std::span<const double> est, const std::vector<std::vector<double>>& refs,
             std::size_t target);

// metric(est) - metric(mixture) for refs[target].
double improvement(Metric metric, std::span<const double> est, const std::vector<std::vector<double>>& refs,
                   std::span<const double> mixture, std::size_t target);

// Assignment (permutation[i] = estimate for reference i) with the highest mean
// SI-SDR, by exhaustive search. Ties keep the first permutation found.
std::vector<std::size_t> best_si_sdr_permutation(const std::vector<std::vector<double>>& estimates,
                                                 const std::vector<std::vector<double>>& refs);

struct SeparationScores {
  std::vector<std::size_t> permutation;
  // Per reference, after the permutation.
  std::vector<double> sdr, si_sdr, sdr_i, si_sdr_i;
  bool regularized = false;
  bool reduced_taps = false;
};

// Scores aligned estimates (permutation given) against refs and the mixture.
// SDR is skipped (left empty) when with_sdr is false.
SeparationScores score_separation(const std::vector<std::vector<double>>& estimates,
                                  const std::vector<std::vector<double>>& refs, std::span<const double> mixture,
                                  std::vector<std::size_t> permutation, bool with_sdr, std::size_t taps = kBssTaps);

}  // namespace medleysep

#endif  // MEDLEYSEP_EVALUATION_METRICS_H_
