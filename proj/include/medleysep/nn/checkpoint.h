// include/medleysep/nn/checkpoint.h

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

#ifndef MEDLEYSEP_NN_CHECKPOINT_H_
#define MEDLEYSEP_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "medleysep/nn/adam.h"
#include "medleysep/nn/module.h"

namespace medleysep::nn {

// File layout: "MSEPCKPT", u32 version, u64 header length, JSON header, then
// the tensors as little-endian float64 in header order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TensorRecord {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

struct Checkpoint {
  nlohmann::json config = nlohmann::json::object();
  std::int64_t step = 0;
  nlohmann::json info = nlohmann::json::object();  // free-form (metrics, lr, ...)
  std::vector<TensorRecord> tensors;

  const TensorRecord* find(const std::string& name) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
// Throws IoError naming `origin` on malformed input.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& origin);

// Writes to a temporary sibling and renames, so readers never see a partial file.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void store_params(Checkpoint& ckpt, std::span<const NamedParam> params);
// Copies matching tensors into params. Throws std::invalid_argument when a
// parameter is missing or its shape differs.
void restore_params(const Checkpoint& ckpt, std::span<const NamedParam> params);

void store_optimizer(Checkpoint& ckpt, const Adam& adam);
// Returns false when the checkpoint has no optimizer state.
bool restore_optimizer(const Checkpoint& ckpt, Adam& adam);

}  // namespace medleysep::nn

#endif  // MEDLEYSEP_NN_CHECKPOINT_H_
