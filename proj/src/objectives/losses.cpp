// src/objectives/losses.cpp

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

#include "medleysep/objectives/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace medleysep {
namespace {

constexpr double kDbPerNeper = 10.0 / 2.302585092994046;
// Sample rate is irrelevant to the losses; the spectrogram just carries it.
constexpr int kNominalRate = 16000;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_pair(std::span<const double> est, std::span<const double> ref, const char* what) {
  if (est.size() != ref.size())
    throw std::invalid_argument(std::string(what) + ": estimate and reference lengths differ");
  if (ref.empty()) throw std::invalid_argument(std::string(what) + ": empty signals");
}

void check_reference(std::span<const double> ref, const char* what) {
  if (std::all_of(ref.begin(), ref.end(), [](double v) { return v == 0.0; }))
    throw std::invalid_argument(std::string(what) + ": reference is all zero");
}

ValueGrad si_sdr_impl(std::span<const double> est, std::span<const double> ref, bool want_grad) {
  check_pair(est, ref, "si_sdr");
  check_reference(ref, "si_sdr");
  const double rr = dot(ref, ref), er = dot(est, ref);
  const double alpha = er / rr;
  const double target = er * er / rr;  // ||alpha ref||^2
  double residual = 0.0;                // ||alpha ref - est||^2
  for (std::size_t n = 0; n < est.size(); ++n) residual += (alpha * ref[n] - est[n]) * (alpha * ref[n] - est[n]);
  ValueGrad out;
  if (want_grad) out.grad.assign(est.size(), 0.0);
  if (residual <= 0.0) {
    out.value = kSiSdrCapDb;
    return out;
  }
  if (target <= 0.0) {
    out.value = -kSiSdrCapDb;
    return out;
  }
  out.value = kDbPerNeper * (std::log(target) - std::log(residual));
  if (out.value > kSiSdrCapDb || out.value < -kSiSdrCapDb) {
    out.value = std::clamp(out.value, -kSiSdrCapDb, kSiSdrCapDb);
    return out;
  }
  if (want_grad) {
    for (std::size_t n = 0; n < est.size(); ++n) {
      const double dtarget = 2.0 * er * ref[n] / rr;
      const double dresidual = 2.0 * est[n] - dtarget;
      out.grad[n] = kDbPerNeper * (dtarget / target - dresidual / residual);
    }
  }
  return out;
}

ValueGrad snr_impl(std::span<const double> est, std::span<const double> ref, bool want_grad) {
  check_pair(est, ref, "snr");
  check_reference(ref, "snr");
  const double rr = dot(ref, ref);
  double err = 0.0;
  for (std::size_t n = 0; n < est.size(); ++n) err += (ref[n] - est[n]) * (ref[n] - est[n]);
  const double denom = err + kSnrTau * rr;
  ValueGrad out;
  out.value = kDbPerNeper * (std::log(rr) - std::log(denom));
  if (want_grad) {
    out.grad.resize(est.size());
    for (std::size_t n = 0; n < est.size(); ++n) out.grad[n] = kDbPerNeper * 2.0 * (ref[n] - est[n]) / denom;
  }
  return out;
}

ValueGrad mag_loss_impl(std::span<const double> est, std::span<const double> ref,
                        std::span<const StftConfig> resolutions, bool want_grad) {
  check_pair(est, ref, "multi_res_stft_loss");
  ValueGrad out;
  if (want_grad) out.grad.assign(est.size(), 0.0);
  for (const auto& cfg : resolutions) {
    const auto E = stft(est, cfg, kNominalRate);
    const auto R = stft(ref, cfg, kNominalRate);
    const auto e = E.data();
    const auto r = R.data();
    const std::size_t count = e.size();
    std::vector<double> me(count), mr(count);
    double diff2 = 0.0, ref2 = 0.0, logl1 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      me[i] = std::abs(e[i]);
      mr[i] = std::abs(r[i]);
      diff2 += (mr[i] - me[i]) * (mr[i] - me[i]);
      ref2 += mr[i] * mr[i];
      logl1 += std::abs(std::log(mr[i] + kStftLossEps) - std::log(me[i] + kStftLossEps));
    }
    const double diff_norm = std::sqrt(diff2);
    const double ref_norm = std::sqrt(ref2) + kStftLossEps;
    out.value += diff_norm / ref_norm + logl1 / static_cast<double>(count);
    if (!want_grad) continue;

    ComplexSpectrogram g(E.frames(), cfg, kNominalRate);
    auto gd = g.data();
    for (std::size_t i = 0; i < count; ++i) {
      if (me[i] == 0.0) continue;
      double dmag = 0.0;
      if (diff_norm > 0.0) dmag += (me[i] - mr[i]) / (diff_norm * ref_norm);
      const double d = std::log(mr[i] + kStftLossEps) - std::log(me[i] + kStftLossEps);
      if (d != 0.0) dmag += (d > 0.0 ? -1.0 : 1.0) / ((me[i] + kStftLossEps) * static_cast<double>(count));
      gd[i] = dmag * e[i] / me[i];
    }
    const auto gx = stft_adjoint(g, est.size());
    for (std::size_t n = 0; n < est.size(); ++n) out.grad[n] += gx[n];
  }
  return out;
}

ValueGrad ri_loss_impl(std::span<const double> est, std::span<const double> ref,
                       std::span<const StftConfig> resolutions, bool want_grad) {
  check_pair(est, ref, "ri_stft_loss");
  ValueGrad out;
  if (want_grad) out.grad.assign(est.size(), 0.0);
  auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  for (const auto& cfg : resolutions) {
    const auto E = stft(est, cfg, kNominalRate);
    const auto R = stft(ref, cfg, kNominalRate);
    const auto e = E.data();
    const auto r = R.data();
    const double count = 2.0 * static_cast<double>(e.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
      sum += std::abs(r[i].real() - e[i].real()) + std::abs(r[i].imag() - e[i].imag());
    out.value += sum / count;
    if (!want_grad) continue;
    ComplexSpectrogram g(E.frames(), cfg, kNominalRate);
    auto gd = g.data();
    for (std::size_t i = 0; i < e.size(); ++i)
      gd[i] = {sign(e[i].real() - r[i].real()) / count, sign(e[i].imag() - r[i].imag()) / count};
    const auto gx = stft_adjoint(g, est.size());
    for (std::size_t n = 0; n < est.size(); ++n) out.grad[n] += gx[n];
  }
  return out;
}

PairLoss negate(ValueGrad (*metric)(std::span<const double>, std::span<const double>, bool)) {
  return [metric](std::span<const double> est, std::span<const double> ref, bool want_grad) {
    auto vg = metric(est, ref, want_grad);
    vg.value = -vg.value;
    for (auto& g : vg.grad) g = -g;
    return vg;
  };
}

}  // namespace

double si_sdr(std::span<const double> est, std::span<const double> ref) { return si_sdr_impl(est, ref, false).value; }
ValueGrad si_sdr_grad(std::span<const double> est, std::span<const double> ref) {
  return si_sdr_impl(est, ref, true);
}

double snr(std::span<const double> est, std::span<const double> ref) { return snr_impl(est, ref, false).value; }
ValueGrad snr_grad(std::span<const double> est, std::span<const double> ref) { return snr_impl(est, ref, true); }

double multi_res_stft_loss(std::span<const double> est, std::span<const double> ref,
                           std::span<const StftConfig> resolutions) {
  return mag_loss_impl(est, ref, resolutions, false).value;
}
ValueGrad multi_res_stft_loss_grad(std::span<const double> est, std::span<const double> ref,
                                   std::span<const StftConfig> resolutions) {
  return mag_loss_impl(est, ref, resolutions, true);
}

double ri_stft_loss(std::span<const double> est, std::span<const double> ref,
                    std::span<const StftConfig> resolutions) {
  return ri_loss_impl(est, ref, resolutions, false).value;
}
ValueGrad ri_stft_loss_grad(std::span<const double> est, std::span<const double> ref,
                            std::span<const StftConfig> resolutions) {
  return ri_loss_impl(est, ref, resolutions, true);
}

std::vector<StftConfig> default_loss_resolutions() {
  std::vector<StftConfig> out;
  for (int fft : {512, 1024, 2048}) {
    StftConfig c;
    c.fft_size = fft;
    c.win_size = fft;
    c.hop_size = fft / 4;
    out.push_back(c);
  }
  return out;
}

std::string to_string(TimeLoss t) { return t == TimeLoss::kSiSdr ? "si_sdr" : "snr"; }

TimeLoss time_loss_from_string(const std::string& name) {
  if (name == "si_sdr") return TimeLoss::kSiSdr;
  if (name == "snr") return TimeLoss::kSnr;
  throw std::invalid_argument("unknown time loss '" + name + "' (expected si_sdr or snr)");
}

void LossConfig::validate() const {
  for (double w : {time_weight, stft_mag_weight, stft_ri_weight})
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("LossConfig: weights must be non-negative");
  if (time_weight == 0.0 && stft_mag_weight == 0.0 && stft_ri_weight == 0.0)
    throw std::invalid_argument("LossConfig: at least one weight must be positive");
  if ((stft_mag_weight > 0.0 || stft_ri_weight > 0.0) && stft_resolutions.empty())
    throw std::invalid_argument("LossConfig: STFT weights need at least one resolution");
  for (const auto& r : stft_resolutions) r.validate();
}

PairLoss negative_si_sdr_loss() { return negate(&si_sdr_impl); }
PairLoss negative_snr_loss() { return negate(&snr_impl); }

PairLoss make_pair_loss(const LossConfig& config) {
  config.validate();
  const auto time = config.time_loss == TimeLoss::kSiSdr ? negative_si_sdr_loss() : negative_snr_loss();
  return [config, time](std::span<const double> est, std::span<const double> ref, bool want_grad) {
    ValueGrad out;
    if (want_grad) out.grad.assign(est.size(), 0.0);
    auto accumulate = [&](const ValueGrad& part, double weight) {
      out.value += weight * part.value;
      for (std::size_t n = 0; n < part.grad.size(); ++n) out.grad[n] += weight * part.grad[n];
    };
    if (config.time_weight > 0.0) accumulate(time(est, ref, want_grad), config.time_weight);
    if (config.stft_mag_weight > 0.0)
      accumulate(mag_loss_impl(est, ref, config.stft_resolutions, want_grad), config.stft_mag_weight);
    if (config.stft_ri_weight > 0.0)
      accumulate(ri_loss_impl(est, ref, config.stft_resolutions, want_grad), config.stft_ri_weight);
    return out;
  };
}

std::vector<std::vector<double>> mixture_consistency(const std::vector<std::vector<double>>& estimates,
                                                     std::span<const double> mixture) {
  if (estimates.empty()) throw std::invalid_argument("mixture_consistency: no estimates");
  for (const auto& e : estimates)
    if (e.size() != mixture.size()) throw std::invalid_argument("mixture_consistency: length mismatch");
  const double n_src = static_cast<double>(estimates.size());
  auto out = estimates;
  for (std::size_t n = 0; n < mixture.size(); ++n) {
    double sum = 0.0;
    for (const auto& e : estimates) sum += e[n];
    const double share = (mixture[n] - sum) / n_src;
    for (auto& o : out) o[n] += share;
  }
  return out;
}

std::vector<AudioBuffer> mixture_consistency(std::span<const AudioBuffer> estimates, const AudioBuffer& mixture) {
  std::vector<std::vector<double>> raw;
  for (const auto& e : estimates) {
    if (e.sample_rate() != mixture.sample_rate())
      throw std::invalid_argument("mixture_consistency: sample rate mismatch");
    raw.push_back(e.vec());
  }
  std::vector<AudioBuffer> out;
  for (auto& v : mixture_consistency(raw, mixture.samples())) out.emplace_back(std::move(v), mixture.sample_rate());
  return out;
}

std::vector<std::vector<double>> mixture_consistency_adjoint(const std::vector<std::vector<double>>& grads) {
  if (grads.empty()) return {};
  const double n_src = static_cast<double>(grads.size());
  auto out = grads;
  for (std::size_t n = 0; n < grads[0].size(); ++n) {
    double sum = 0.0;
    for (const auto& g : grads) sum += g[n];
    for (auto& o : out) o[n] -= sum / n_src;
  }
  return out;
}

PitResult upit_loss(const std::vector<std::vector<double>>& estimates,
                    const std::vector<std::vector<double>>& references, const PairLoss& loss, bool want_grad) {
  const std::size_t n = estimates.size();
  if (n != references.size()) throw std::invalid_argument("upit_loss: estimate and reference counts differ");
  if (n == 0 || n > 4) throw std::invalid_argument("upit_loss: need between 1 and 4 sources");

  // pair[e][r] = loss(estimate e, reference r)
  std::vector<std::vector<double>> pair(n, std::vector<double>(n));
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t r = 0; r < n; ++r) pair[e][r] = loss(estimates[e], references[r], false).value;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  PitResult best;
  best.loss = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) total += pair[perm[r]][r];
    total /= static_cast<double>(n);
    if (total < best.loss || best.permutation.empty()) {
      best.loss = total;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (want_grad) {
    best.grads.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t e = best.permutation[r];
      auto vg = loss(estimates[e], references[r], true);
      for (auto& g : vg.grad) g /= static_cast<double>(n);
      best.grads[e] = std::move(vg.grad);
    }
  }
  return best;
}

PitResult orpit_loss(std::span<const double> est_main, std::span<const double> est_rest,
                     std::span<const double> ref_main, std::span<const double> ref_rest_sum, const PairLoss& loss,
                     bool want_grad) {
  auto main = loss(est_main, ref_main, want_grad);
  auto rest = loss(est_rest, ref_rest_sum, want_grad);
  PitResult out;
  out.loss = 0.5 * (main.value + rest.value);
  out.permutation = {0, 1};
  if (want_grad) {
    for (auto& g : main.grad) g *= 0.5;
    for (auto& g : rest.grad) g *= 0.5;
    out.grads = {std::move(main.grad), std::move(rest.grad)};
  }
  return out;
}

}  // namespace medleysep
