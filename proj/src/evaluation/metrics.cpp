// src/evaluation/metrics.cpp

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

#include "medleysep/evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "medleysep/audio/fft.h"
#include "medleysep/objectives/losses.h"

namespace medleysep {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// c[k] = sum_n a[n] b[n + k] for k in [0, lags), zero outside the signals.
std::vector<double> correlate(std::span<const double> a, std::span<const double> b, std::size_t lags) {
  const std::size_t n = next_pow2(std::max(a.size(), b.size()) + lags);
  std::vector<double> pa(n, 0.0), pb(n, 0.0), out(n);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
  rfft(pa, fa);
  rfft(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
  irfft(fa, out);
  out.resize(lags);
  return out;
}

// Reciprocal condition number below which the ridge is added.
constexpr double kIllConditioned = 1e-10;

double to_db(double target, double distortion) {
  if (distortion <= 0.0) return kSiSdrCapDb;
  if (target <= 0.0) return -kSiSdrCapDb;
  return std::clamp(10.0 * std::log10(target / distortion), -kSiSdrCapDb, kSiSdrCapDb);
}

}  // namespace

TargetProjector::TargetProjector(std::span<const double> reference, std::size_t taps)
    : reference_(reference.begin(), reference.end()), taps_(std::min(taps, reference.size())) {
  if (taps == 0) throw std::invalid_argument("bss_sdr: taps must be positive");
  if (reference.empty()) throw std::invalid_argument("bss_sdr: empty reference");
  const auto auto_corr = correlate(reference, reference, taps_);
  if (auto_corr[0] <= 0.0) throw std::invalid_argument("bss_sdr: reference is all zero");
  Eigen::MatrixXd gram(taps_, taps_);
  for (std::size_t i = 0; i < taps_; ++i)
    for (std::size_t j = 0; j < taps_; ++j) gram(i, j) = auto_corr[i > j ? i - j : j - i];
  solver_.compute(gram);
  if (solver_.info() != Eigen::Success || solver_.rcond() < kIllConditioned) {
    gram.diagonal().array() += kBssRidge * auto_corr[0];
    solver_.compute(gram);
    regularized_ = true;
  }
}

SdrResult TargetProjector::sdr(std::span<const double> est) const {
  if (est.size() != reference_.size()) throw std::invalid_argument("bss_sdr: estimate and reference lengths differ");
  const auto cross = correlate(reference_, est, taps_);
  const Eigen::Map<const Eigen::VectorXd> d(cross.data(), static_cast<Eigen::Index>(taps_));
  const Eigen::VectorXd c = solver_.solve(d);
  // s_target = sum_k c_k ref[n - k]; |s_target|^2 = c'Gc = c'd at the
  // least-squares optimum, and the residual energy is |est|^2 - c'd.
  const double target = c.dot(d);
  const double energy = std::inner_product(est.begin(), est.end(), est.begin(), 0.0);
  SdrResult out;
  out.value = to_db(target, energy - target);
  out.regularized = regularized_;
  out.taps = taps_;
  return out;
}

SdrResult bss_sdr(std::span<const double> est, const std::vector<std::vector<double>>& refs, std::size_t target,
                  std::size_t taps) {
  if (target >= refs.size()) throw std::invalid_argument("bss_sdr: target index out of range");
  for (const auto& r : refs)
    if (r.size() != est.size()) throw std::invalid_argument("bss_sdr: estimate and reference lengths differ");
  return TargetProjector(refs[target], taps).sdr(est);
}

std::string to_string(Metric m) { return m == Metric::kSdr ? "sdr" : "si_sdr"; }

double score(Metric metric, std::span<const double> est, const std::vector<std::vector<double>>& refs,
             std::size_t target) {
  if (target >= refs.size()) throw std::invalid_argument("score: target index out of range");
  if (metric == Metric::kSdr) return bss_sdr(est, refs, target).value;
  return si_sdr(est, refs[target]);
}

double improvement(Metric metric, std::span<const double> est, const std::vector<std::vector<double>>& refs,
                   std::span<const double> mixture, std::size_t target) {
  return score(metric, est, refs, target) - score(metric, mixture, refs, target);
}

std::vector<std::size_t> best_si_sdr_permutation(const std::vector<std::vector<double>>& estimates,
                                                 const std::vector<std::vector<double>>& refs) {
  const std::size_t n = refs.size();
  if (estimates.size() != n || n == 0) throw std::invalid_argument("best_si_sdr_permutation: count mismatch");
  if (n > 8) throw std::invalid_argument("best_si_sdr_permutation: too many sources for exhaustive search");
  std::vector<std::vector<double>> table(n, std::vector<double>(n));
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t r = 0; r < n; ++r) table[e][r] = si_sdr(estimates[e], refs[r]);
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_total = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) total += table[perm[r]][r];
    if (total > best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

SeparationScores score_separation(const std::vector<std::vector<double>>& estimates,
                                  const std::vector<std::vector<double>>& refs, std::span<const double> mixture,
                                  std::vector<std::size_t> permutation, bool with_sdr, std::size_t taps) {
  const std::size_t n = refs.size();
  if (estimates.size() != n || permutation.size() != n)
    throw std::invalid_argument("score_separation: estimate, reference and permutation counts differ");
  SeparationScores out;
  out.permutation = std::move(permutation);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& est = estimates.at(out.permutation[r]);
    const double mix_si = si_sdr(mixture, refs[r]);
    out.si_sdr.push_back(si_sdr(est, refs[r]));
    out.si_sdr_i.push_back(out.si_sdr.back() - mix_si);
    if (with_sdr) {
      const TargetProjector projector(refs[r], taps);
      const auto s = projector.sdr(est);
      const auto m = projector.sdr(mixture);
      out.sdr.push_back(s.value);
      out.sdr_i.push_back(s.value - m.value);
      out.regularized = out.regularized || s.regularized;
      out.reduced_taps = out.reduced_taps || s.taps < taps;
    }
  }
  return out;
}

}  // namespace medleysep
