/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "captrans/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "captrans/errors.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::nn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& file) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated weights file " + file.string());
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_weights(const std::filesystem::path& file, const ParamStore& store) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  write_weights(out, store);
  if (!out) throw DataError("failed writing " + file.string());
}

void write_weights(std::ostream& out, const ParamStore& store) {
  for (const auto& [name, p] : store) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(p.value.values().data()),
              static_cast<std::streamsize>(p.value.size() * sizeof(float)));
  }
}

std::map<std::string, Tensor> read_weights(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());
  std::map<std::string, Tensor> out;
  while (in.peek() != std::ifstream::traits_type::eof()) {
    const std::uint32_t name_len = get_u32(in, file);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw DataError("truncated weights file " + file.string());
    const std::uint32_t rank = get_u32(in, file);
    if (rank == 0 || rank > 8) throw DataError("bad tensor rank in " + file.string());
    Shape shape(rank);
    for (auto& d : shape) d = get_u32(in, file);
    std::vector<float> values(shape_size(shape));
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(float)))) {
      throw DataError("truncated weights file " + file.string());
    }
    out.emplace(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return out;
}

void write_json_file(const std::filesystem::path& file, const nlohmann::json& value) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << value.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid JSON in " + file.string() + ": " + e.what());
  }
}

void write_checkpoint(const std::filesystem::path& dir, const ParamStore& store,
                      nlohmann::json config) {
  std::filesystem::create_directories(dir);
  nlohmann::json trainable = nlohmann::json::object();
  for (const auto& [name, p] : store) trainable[name] = p.trainable;
  config["trainable"] = trainable;
  write_json_file(dir / "config.json", config);
  write_weights(dir / "weights.bin", store);
}

Checkpoint read_checkpoint(const std::filesystem::path& dir) {
  Checkpoint ckpt;
  ckpt.config = read_json_file(dir / "config.json");
  auto tensors = read_weights(dir / "weights.bin");
  const auto& trainable = ckpt.config.value("trainable", nlohmann::json::object());
  for (auto& [name, t] : tensors) {
    const bool flag = trainable.contains(name) ? trainable.at(name).get<bool>() : true;
    ckpt.params.add(name, std::move(t), flag);
  }
  return ckpt;
}

namespace {
std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::string checkpoint_hash(const std::filesystem::path& dir) {
  std::ifstream in(dir / "weights.bin", std::ios::binary);
  if (!in) throw DataError("cannot open " + (dir / "weights.bin").string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a64(bytes));
}

std::string params_hash(const ParamStore& store) {
  std::ostringstream out(std::ios::binary);
  write_weights(out, store);
  return hex64(fnv1a64(out.str()));
}

}  // namespace captrans::nn
