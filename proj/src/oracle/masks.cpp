// src/oracle/masks.cpp

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

#include "medleysep/oracle/masks.h"

#include <cmath>
#include <stdexcept>

namespace medleysep {
namespace {

void check_stems(std::span<const ComplexSpectrogram> stems, const char* what) {
  if (stems.empty()) throw std::invalid_argument(std::string(what) + ": no stems");
  for (const auto& s : stems)
    if (!s.same_shape(stems.front())) throw std::invalid_argument(std::string(what) + ": stem shapes differ");
}

template <class T>
void check_mask(const TfMask<T>& mask, const ComplexSpectrogram& x) {
  if (mask.frames != x.frames() || mask.bins != x.bins() || mask.values.size() != x.data().size())
    throw std::invalid_argument("apply_mask: mask and mixture shapes differ");
}

template <class T>
AudioBuffer apply_impl(const TfMask<T>& mask, const ComplexSpectrogram& mixture, std::size_t out_len) {
  check_mask(mask, mixture);
  ComplexSpectrogram out = mixture;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= mask.values[i];
  return istft(out, out_len);
}

}  // namespace

std::vector<RealMask> ibm(std::span<const ComplexSpectrogram> stems) {
  check_stems(stems, "ibm");
  const auto& first = stems.front();
  std::vector<RealMask> masks(stems.size(), RealMask(first.frames(), first.bins()));
  const std::size_t count = first.data().size();
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t winner = 0;
    double best = std::abs(stems[0].data()[i]);
    for (std::size_t s = 1; s < stems.size(); ++s) {
      const double m = std::abs(stems[s].data()[i]);
      if (m > best) {
        best = m;
        winner = s;
      }
    }
    masks[winner].values[i] = 1.0;
  }
  return masks;
}

std::vector<RealMask> irm(std::span<const ComplexSpectrogram> stems) {
  check_stems(stems, "irm");
  const auto& first = stems.front();
  std::vector<RealMask> masks(stems.size(), RealMask(first.frames(), first.bins()));
  const std::size_t count = first.data().size();
  for (std::size_t i = 0; i < count; ++i) {
    double total = kIrmEps;
    for (const auto& s : stems) total += std::abs(s.data()[i]);
    for (std::size_t s = 0; s < stems.size(); ++s) masks[s].values[i] = std::abs(stems[s].data()[i]) / total;
  }
  return masks;
}

ComplexMask cirm(const ComplexSpectrogram& stem, const ComplexSpectrogram& mixture) {
  if (!stem.same_shape(mixture)) throw std::invalid_argument("cirm: stem and mixture shapes differ");
  ComplexMask mask(mixture.frames(), mixture.bins());
  const auto s = stem.data();
  const auto x = mixture.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > kCirmDelta) mask.values[i] = s[i] / x[i];
  return mask;
}

AudioBuffer apply_mask(const RealMask& mask, const ComplexSpectrogram& mixture, std::size_t out_len) {
  return apply_impl(mask, mixture, out_len);
}

AudioBuffer apply_mask(const ComplexMask& mask, const ComplexSpectrogram& mixture, std::size_t out_len) {
  return apply_impl(mask, mixture, out_len);
}

std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::kIbm: return "ibm";
    case OracleKind::kIrm: return "irm";
    case OracleKind::kCirm: return "cirm";
  }
  return "?";
}

OracleKind oracle_from_string(const std::string& name) {
  if (name == "ibm" || name == "IBM") return OracleKind::kIbm;
  if (name == "irm" || name == "IRM") return OracleKind::kIrm;
  if (name == "cirm" || name == "cIRM") return OracleKind::kCirm;
  throw std::invalid_argument("unknown oracle '" + name + "' (expected ibm, irm or cirm)");
}

std::vector<AudioBuffer> oracle_separate(OracleKind kind, std::span<const AudioBuffer> stems,
                                         const AudioBuffer& mixture, const StftConfig& config) {
  if (stems.empty()) throw std::invalid_argument("oracle_separate: no stems");
  const auto X = stft(mixture, config);
  std::vector<ComplexSpectrogram> specs;
  for (const auto& s : stems) {
    if (s.size() != mixture.size()) throw std::invalid_argument("oracle_separate: stem and mixture lengths differ");
    specs.push_back(stft(s, config));
  }
  std::vector<AudioBuffer> out;
  if (kind == OracleKind::kCirm) {
    for (const auto& S : specs) out.push_back(apply_mask(cirm(S, X), X, mixture.size()));
    return out;
  }
  const auto masks = kind == OracleKind::kIbm ? ibm(specs) : irm(specs);
  for (const auto& m : masks) out.push_back(apply_mask(m, X, mixture.size()));
  return out;
}

}  // namespace medleysep
