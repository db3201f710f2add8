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

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::hyperopt {

enum class DimKind { kLinear, kLog, kInteger, kCategorical };

std::string to_string(DimKind k);
DimKind parse_dim_kind(const std::string& s);

/// Integer dimensions hold int64, categorical ones strings, the rest doubles.
using ParamValue = std::variant<double, std::int64_t, std::string>;
using HyperPoint = std::map<std::string, ParamValue>;

struct Dimension {
  std::string name;
  DimKind kind = DimKind::kLinear;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::string> categories;

  static Dimension linear(std::string name, double lo, double hi);
  static Dimension log(std::string name, double lo, double hi);
  static Dimension integer(std::string name, std::int64_t lo, std::int64_t hi);
  static Dimension categorical(std::string name, std::vector<std::string> categories);

  void validate() const;
  bool contains(const ParamValue& v) const;
  /// Width of this dimension in the surrogate's feature vector.
  std::size_t encoded_width() const { return kind == DimKind::kCategorical ? categories.size() : 1; }
};

class ParamSpace {
 public:
  ParamSpace() = default;
  explicit ParamSpace(std::vector<Dimension> dims);

  const std::vector<Dimension>& dimensions() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  const Dimension& at(const std::string& name) const;
  bool has(const std::string& name) const;

  /// Complete and within bounds.
  bool contains(const HyperPoint& p) const;
  /// Feature vector for the surrogate: one-hot categories, log10 for log
  /// dimensions, raw values otherwise.
  std::vector<double> encode(const HyperPoint& p) const;
  std::size_t encoded_size() const;

  nlohmann::json to_json() const;
  static ParamSpace from_json(const nlohmann::json& j);

 private:
  std::vector<Dimension> dims_;
};

/// Language model search space: init, sizes, optimiser, regularisation,
/// minibatch.
ParamSpace lm_space();
/// Caption generator search space. Without transfer the prefix encoder sizes
/// and embedding dropout are tuned as well.
ParamSpace capgen_space(bool transferred);
/// Union of every tunable hyperparameter.
ParamSpace default_space();

/// Independent draws: uniform for linear, integer and categorical dimensions,
/// log-uniform for log dimensions.
HyperPoint random_point(const ParamSpace& space, nn::Rng& rng);

nlohmann::json point_to_json(const HyperPoint& p);
/// Values are typed by `space`.
HyperPoint point_from_json(const nlohmann::json& j, const ParamSpace& space);

double get_double(const HyperPoint& p, const std::string& name);
std::int64_t get_int(const HyperPoint& p, const std::string& name);
const std::string& get_string(const HyperPoint& p, const std::string& name);

}  // namespace captrans::hyperopt
