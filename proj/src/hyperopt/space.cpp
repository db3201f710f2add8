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

#include "captrans/hyperopt/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "captrans/errors.hpp"

namespace captrans::hyperopt {

std::string to_string(DimKind k) {
  switch (k) {
    case DimKind::kLinear: return "linear";
    case DimKind::kLog: return "log";
    case DimKind::kInteger: return "integer";
    case DimKind::kCategorical: return "categorical";
  }
  return "linear";
}

DimKind parse_dim_kind(const std::string& s) {
  if (s == "linear") return DimKind::kLinear;
  if (s == "log") return DimKind::kLog;
  if (s == "integer") return DimKind::kInteger;
  if (s == "categorical") return DimKind::kCategorical;
  throw ConfigError("unknown dimension kind '" + s + "'");
}

Dimension Dimension::linear(std::string name, double lo, double hi) {
  return Dimension{std::move(name), DimKind::kLinear, lo, hi, {}};
}
Dimension Dimension::log(std::string name, double lo, double hi) {
  return Dimension{std::move(name), DimKind::kLog, lo, hi, {}};
}
Dimension Dimension::integer(std::string name, std::int64_t lo, std::int64_t hi) {
  return Dimension{std::move(name), DimKind::kInteger, static_cast<double>(lo), static_cast<double>(hi), {}};
}
Dimension Dimension::categorical(std::string name, std::vector<std::string> categories) {
  return Dimension{std::move(name), DimKind::kCategorical, 0.0, 0.0, std::move(categories)};
}

void Dimension::validate() const {
  if (name.empty()) throw ConfigError("dimension name must not be empty");
  switch (kind) {
    case DimKind::kCategorical: {
      if (categories.empty()) throw ConfigError("categorical dimension '" + name + "' has no categories");
      std::set<std::string> seen(categories.begin(), categories.end());
      if (seen.size() != categories.size()) throw ConfigError("dimension '" + name + "' repeats a category");
      return;
    }
    case DimKind::kLog:
      if (!(lo > 0.0)) throw ConfigError("log dimension '" + name + "' needs a positive lower bound");
      [[fallthrough]];
    case DimKind::kLinear:
      if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConfigError("dimension '" + name + "' needs finite bounds lo < hi");
      }
      return;
    case DimKind::kInteger:
      if (!(lo <= hi) || lo != std::floor(lo) || hi != std::floor(hi)) {
        throw ConfigError("integer dimension '" + name + "' needs integer bounds lo <= hi");
      }
      return;
  }
}

bool Dimension::contains(const ParamValue& v) const {
  switch (kind) {
    case DimKind::kCategorical: {
      const auto* s = std::get_if<std::string>(&v);
      return s && std::find(categories.begin(), categories.end(), *s) != categories.end();
    }
    case DimKind::kInteger: {
      const auto* i = std::get_if<std::int64_t>(&v);
      return i && static_cast<double>(*i) >= lo && static_cast<double>(*i) <= hi;
    }
    default: {
      const auto* d = std::get_if<double>(&v);
      return d && *d >= lo && *d <= hi;
    }
  }
}

ParamSpace::ParamSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  std::set<std::string> names;
  for (const auto& d : dims_) {
    d.validate();
    if (!names.insert(d.name).second) throw ConfigError("dimension '" + d.name + "' defined twice");
  }
}

const Dimension& ParamSpace::at(const std::string& name) const {
  for (const auto& d : dims_) {
    if (d.name == name) return d;
  }
  throw ConfigError("no dimension named '" + name + "'");
}

bool ParamSpace::has(const std::string& name) const {
  return std::any_of(dims_.begin(), dims_.end(), [&](const Dimension& d) { return d.name == name; });
}

bool ParamSpace::contains(const HyperPoint& p) const {
  if (p.size() != dims_.size()) return false;
  for (const auto& d : dims_) {
    const auto it = p.find(d.name);
    if (it == p.end() || !d.contains(it->second)) return false;
  }
  return true;
}

std::size_t ParamSpace::encoded_size() const {
  std::size_t n = 0;
  for (const auto& d : dims_) n += d.encoded_width();
  return n;
}

std::vector<double> ParamSpace::encode(const HyperPoint& p) const {
  std::vector<double> out;
  out.reserve(encoded_size());
  for (const auto& d : dims_) {
    const auto it = p.find(d.name);
    if (it == p.end()) throw ConfigError("point is missing '" + d.name + "'");
    switch (d.kind) {
      case DimKind::kCategorical: {
        const std::string& v = std::get<std::string>(it->second);
        for (const auto& c : d.categories) out.push_back(c == v ? 1.0 : 0.0);
        break;
      }
      case DimKind::kInteger: out.push_back(static_cast<double>(std::get<std::int64_t>(it->second))); break;
      case DimKind::kLog: out.push_back(std::log10(std::get<double>(it->second))); break;
      case DimKind::kLinear: out.push_back(std::get<double>(it->second)); break;
    }
  }
  return out;
}

nlohmann::json ParamSpace::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : dims_) {
    nlohmann::json j = {{"name", d.name}, {"kind", to_string(d.kind)}};
    if (d.kind == DimKind::kCategorical) {
      j["categories"] = d.categories;
    } else if (d.kind == DimKind::kInteger) {
      j["lo"] = static_cast<std::int64_t>(d.lo);
      j["hi"] = static_cast<std::int64_t>(d.hi);
    } else {
      j["lo"] = d.lo;
      j["hi"] = d.hi;
    }
    arr.push_back(j);
  }
  return arr;
}

ParamSpace ParamSpace::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("search space must be a JSON array of dimensions");
  std::vector<Dimension> dims;
  try {
    for (const auto& e : j) {
      Dimension d;
      d.name = e.at("name").get<std::string>();
      d.kind = parse_dim_kind(e.at("kind").get<std::string>());
      if (d.kind == DimKind::kCategorical) {
        d.categories = e.at("categories").get<std::vector<std::string>>();
      } else {
        d.lo = e.at("lo").get<double>();
        d.hi = e.at("hi").get<double>();
      }
      dims.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed search space: ") + e.what());
  }
  return ParamSpace(std::move(dims));
}

namespace {

std::vector<Dimension> common_training_dims() {
  return {
      Dimension::categorical("init_method", {"normal", "xavier"}),
      Dimension::log("max_init_weight", 1e-5, 1.0),
      Dimension::categorical("optimizer", {"adam", "rmsprop", "adadelta"}),
      Dimension::log("learning_rate", 1e-5, 1.0),
      Dimension::log("weight_decay", 1e-10, 0.1),
      Dimension::log("max_grad_norm", 1.0, 1000.0),
      Dimension::integer("minibatch_size", 10, 300),
      Dimension::linear("rnn_dropout", 0.0, 0.5),
  };
}

}  // namespace

ParamSpace lm_space() {
  auto dims = common_training_dims();
  dims.push_back(Dimension::integer("embed_size", 64, 512));
  dims.push_back(Dimension::integer("rnn_size", 64, 512));
  dims.push_back(Dimension::linear("embedding_dropout", 0.0, 0.5));
  return ParamSpace(std::move(dims));
}

ParamSpace capgen_space(bool transferred) {
  auto dims = common_training_dims();
  dims.push_back(Dimension::integer("post_image_size", 64, 512));
  dims.push_back(Dimension::categorical("post_image_activation", {"relu", "none"}));
  dims.push_back(Dimension::categorical("normalize_image", {"false", "true"}));
  dims.push_back(Dimension::linear("image_dropout", 0.0, 0.5));
  dims.push_back(Dimension::linear("post_image_dropout", 0.0, 0.5));
  dims.push_back(Dimension::integer("beam_width", 1, 5));
  if (!transferred) {
    dims.push_back(Dimension::integer("embed_size", 64, 512));
    dims.push_back(Dimension::integer("rnn_size", 64, 512));
    dims.push_back(Dimension::linear("embedding_dropout", 0.0, 0.5));
  }
  return ParamSpace(std::move(dims));
}

ParamSpace default_space() { return capgen_space(false); }

HyperPoint random_point(const ParamSpace& space, nn::Rng& rng) {
  HyperPoint p;
  for (const auto& d : space.dimensions()) {
    switch (d.kind) {
      case DimKind::kLinear: p[d.name] = rng.uniform(d.lo, d.hi); break;
      case DimKind::kLog: p[d.name] = std::exp(rng.uniform(std::log(d.lo), std::log(d.hi))); break;
      case DimKind::kInteger: {
        const auto lo = static_cast<std::int64_t>(d.lo);
        const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(d.hi) - lo + 1);
        p[d.name] = lo + static_cast<std::int64_t>(rng.below(span));
        break;
      }
      case DimKind::kCategorical: p[d.name] = d.categories[rng.below(d.categories.size())]; break;
    }
    // exp(log(x)) can step just outside the bounds.
    if (d.kind == DimKind::kLog) p[d.name] = std::clamp(std::get<double>(p[d.name]), d.lo, d.hi);
  }
  return p;
}

nlohmann::json point_to_json(const HyperPoint& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : p) std::visit([&](const auto& x) { j[name] = x; }, v);
  return j;
}

HyperPoint point_from_json(const nlohmann::json& j, const ParamSpace& space) {
  HyperPoint p;
  try {
    for (const auto& d : space.dimensions()) {
      const auto& v = j.at(d.name);
      switch (d.kind) {
        case DimKind::kCategorical: p[d.name] = v.is_boolean() ? (v.get<bool>() ? "true" : "false") : v.get<std::string>(); break;
        case DimKind::kInteger: p[d.name] = v.get<std::int64_t>(); break;
        default: p[d.name] = v.get<double>(); break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed hyperparameter point: ") + e.what());
  }
  if (!space.contains(p)) throw ConfigError("hyperparameter point lies outside the search space");
  return p;
}

double get_double(const HyperPoint& p, const std::string& name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ConfigError("missing hyperparameter '" + name + "'");
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw ConfigError("hyperparameter '" + name + "' is not numeric");
}

std::int64_t get_int(const HyperPoint& p, const std::string& name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ConfigError("missing hyperparameter '" + name + "'");
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  throw ConfigError("hyperparameter '" + name + "' is not an integer");
}

const std::string& get_string(const HyperPoint& p, const std::string& name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ConfigError("missing hyperparameter '" + name + "'");
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("hyperparameter '" + name + "' is not categorical");
}

}  // namespace captrans::hyperopt
