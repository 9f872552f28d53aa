// src/nn/checkpoint.cpp

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

#include "medleysep/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "medleysep/common/error.h"

namespace medleysep::nn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'S', 'E', 'P', 'C', 'K', 'P', 'T'};
constexpr const char* kAdamM = "optimizer.m/";
constexpr const char* kAdamV = "optimizer.v/";

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T get(std::span<const std::uint8_t> bytes, std::size_t at) {
  T v;
  std::memcpy(&v, bytes.data() + at, sizeof(T));
  return v;
}

}  // namespace

const TensorRecord* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header;
  header["step"] = ckpt.step;
  header["config"] = ckpt.config;
  header["info"] = ckpt.info;
  header["tensors"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    if (shape_size(t.shape) != t.data.size()) throw std::invalid_argument("checkpoint tensor " + t.name + ": size/shape mismatch");
    header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data.size();
  }
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + offset * sizeof(double));
  for (const auto& t : ckpt.tensors) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(t.data.data());
    out.insert(out.end(), p, p + t.data.size() * sizeof(double));
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& origin) {
  auto fail = [&](const std::string& why) { return IoError(origin + ": " + why); };
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw fail("not a checkpoint file");
  const auto version = get<std::uint32_t>(bytes, 8);
  if (version != kCheckpointVersion)
    throw fail("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get<std::uint64_t>(bytes, 12);
  if (header_len > bytes.size() - 20) throw fail("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  }
  const std::size_t payload = 20 + header_len;
  const std::size_t available = (bytes.size() - payload) / sizeof(double);
  Checkpoint ckpt;
  try {
    ckpt.step = header.at("step").get<std::int64_t>();
    ckpt.config = header.at("config");
    ckpt.info = header.value("info", nlohmann::json::object());
    for (const auto& t : header.at("tensors")) {
      TensorRecord rec;
      rec.name = t.at("name").get<std::string>();
      rec.shape = t.at("shape").get<Shape>();
      const auto offset = t.at("offset").get<std::size_t>();
      const std::size_t n = shape_size(rec.shape);
      if (offset + n > available) throw fail("tensor " + rec.name + " runs past the end of the file");
      rec.data.resize(n);
      std::memcpy(rec.data.data(), bytes.data() + payload + offset * sizeof(double), n * sizeof(double));
      ckpt.tensors.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(tmp.string() + ": cannot open for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open checkpoint");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, path.string());
}

void store_params(Checkpoint& ckpt, std::span<const NamedParam> params) {
  for (const auto& p : params)
    ckpt.tensors.push_back({p.name, p.var->shape, std::vector<double>(p.var->value.begin(), p.var->value.end())});
}

void restore_params(const Checkpoint& ckpt, std::span<const NamedParam> params) {
  // Validate everything before touching any parameter.
  for (const auto& p : params) {
    const auto* t = ckpt.find(p.name);
    if (!t) throw std::invalid_argument("checkpoint lacks parameter " + p.name);
    if (t->shape != p.var->shape)
      throw std::invalid_argument("checkpoint parameter " + p.name + " has shape " + shape_string(t->shape) +
                                  ", model expects " + shape_string(p.var->shape));
  }
  for (const auto& p : params) {
    const auto* t = ckpt.find(p.name);
    p.var->value = Eigen::Map<const Eigen::ArrayXd>(t->data.data(), static_cast<Eigen::Index>(t->data.size()));
  }
}

void store_optimizer(Checkpoint& ckpt, const Adam& adam) {
  ckpt.info["optimizer_steps"] = adam.steps();
  ckpt.info["lr"] = adam.lr();
  for (const auto& p : adam.params()) {
    const auto& s = adam.state().at(p.name);
    ckpt.tensors.push_back({kAdamM + p.name, p.var->shape, std::vector<double>(s.m.begin(), s.m.end())});
    ckpt.tensors.push_back({kAdamV + p.name, p.var->shape, std::vector<double>(s.v.begin(), s.v.end())});
  }
}

bool restore_optimizer(const Checkpoint& ckpt, Adam& adam) {
  if (!ckpt.info.contains("optimizer_steps")) return false;
  std::map<std::string, Adam::Moments> state;
  for (const auto& p : adam.params()) {
    const auto* m = ckpt.find(kAdamM + p.name);
    const auto* v = ckpt.find(kAdamV + p.name);
    if (!m || !v) throw std::invalid_argument("checkpoint optimizer state lacks " + p.name);
    auto to_array = [](const TensorRecord* t) {
      return Eigen::ArrayXd(Eigen::Map<const Eigen::ArrayXd>(t->data.data(), static_cast<Eigen::Index>(t->data.size())));
    };
    state[p.name] = {to_array(m), to_array(v)};
  }
  adam.load_state(std::move(state), ckpt.info.at("optimizer_steps").get<long>());
  if (ckpt.info.contains("lr")) adam.set_lr(ckpt.info.at("lr").get<double>());
  return true;
}

}  // namespace medleysep::nn
