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

#include "captrans/nn/param_store.hpp"

#include "captrans/errors.hpp"

namespace captrans::nn {

Parameter& ParamStore::add(const std::string& name, Tensor value, bool trainable) {
  if (entries_.count(name)) throw ConfigError("duplicate parameter name: " + name);
  Tensor grad(value.shape());
  auto [it, ok] = entries_.emplace(name, Parameter{std::move(value), std::move(grad), trainable});
  return it->second;
}

void ParamStore::assign(const std::string& name, const Tensor& value) {
  Parameter& p = at(name);
  if (p.value.shape() != value.shape()) {
    throw ShapeError("cannot assign " + shape_string(value.shape()) + " to parameter " + name +
                     " of shape " + shape_string(p.value.shape()));
  }
  p.value = value;
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw StateError("no parameter named " + name);
  return it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw StateError("no parameter named " + name);
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, p] : entries_) p.grad.fill(0.0f);
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, p] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : entries_) n += p.value.size();
  return n;
}

std::map<std::string, Tensor> ParamStore::snapshot() const {
  std::map<std::string, Tensor> out;
  for (const auto& [name, p] : entries_) out.emplace(name, p.value);
  return out;
}

void ParamStore::restore(const std::map<std::string, Tensor>& snap) {
  for (const auto& [name, value] : snap) assign(name, value);
}

}  // namespace captrans::nn
