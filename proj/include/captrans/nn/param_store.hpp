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

#include <map>
#include <string>
#include <vector>

#include "captrans/nn/tensor.hpp"

namespace captrans::nn {

struct Parameter {
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

/// Named parameters with gradient accumulators. Iteration order is the
/// lexicographic name order, which keeps serialization deterministic.
class ParamStore {
 public:
  /// Adds a parameter; throws ConfigError on a duplicate name.
  Parameter& add(const std::string& name, Tensor value, bool trainable = true);
  /// Replaces the value of an existing parameter (shape must match).
  void assign(const std::string& name, const Tensor& value);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  const Tensor& value(const std::string& name) const { return at(name).value; }

  void set_trainable(const std::string& name, bool trainable) { at(name).trainable = trainable; }
  void zero_grads();

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t parameter_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Copy of all values, used for early-stopping rollback.
  std::map<std::string, Tensor> snapshot() const;
  void restore(const std::map<std::string, Tensor>& snap);

 private:
  std::map<std::string, Parameter> entries_;
};

}  // namespace captrans::nn
