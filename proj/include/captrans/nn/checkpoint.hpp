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

#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

#include "json.hpp"

#include "captrans/nn/param_store.hpp"

namespace captrans::nn {

/// weights.bin layout, repeated per tensor in name order:
///   u32 name length, UTF-8 name, u32 rank, u32 dims[rank], float32 values.
/// All integers and floats little-endian.
void write_weights(const std::filesystem::path& file, const ParamStore& store);
std::map<std::string, Tensor> read_weights(const std::filesystem::path& file);
void write_weights(std::ostream& out, const ParamStore& store);

/// FNV-1a 64 of the weights.bin encoding of `store`, as 16 hex digits.
std::string params_hash(const ParamStore& store);

/// Writes `config.json` and `weights.bin` into `dir` (created if needed). The
/// trainable flag of every parameter is recorded under config["trainable"].
void write_checkpoint(const std::filesystem::path& dir, const ParamStore& store,
                      nlohmann::json config);

struct Checkpoint {
  nlohmann::json config;
  ParamStore params;
};

Checkpoint read_checkpoint(const std::filesystem::path& dir);

/// FNV-1a 64 over the weights file, as 16 hex digits.
std::string checkpoint_hash(const std::filesystem::path& dir);

/// Writes JSON with a trailing newline, indent 2.
void write_json_file(const std::filesystem::path& file, const nlohmann::json& value);
nlohmann::json read_json_file(const std::filesystem::path& file);

}  // namespace captrans::nn
