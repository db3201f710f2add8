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

#include "captrans/nn/param_store.hpp"

namespace captrans::nn {

enum class OptimizerKind { kAdam, kRmsProp, kAdaDelta };

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double weight_decay = 1e-10;
  double max_grad_norm = 1000.0;

  // Conventional constants; not tuned.
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  double adadelta_rho = 0.95;
  double adadelta_epsilon = 1e-6;

  /// Checks the tuning ranges (lr, weight decay, max gradient norm).
  void validate() const;
};

/// Per-parameter moments plus a step counter. Only trainable entries are
/// touched; L2 weight decay is added to the gradient before the update.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  /// Allocates zeroed accumulators for every trainable parameter of `store`.
  void init(const ParamStore& store);
  bool initialized() const { return initialized_; }

  /// One update from the gradients currently held in `store`. Throws
  /// StateError if init() was not called or shapes no longer match.
  void step(ParamStore& store);

  const OptimizerConfig& config() const { return config_; }
  std::int64_t steps() const { return step_; }

 private:
  struct Slots {
    Tensor first;
    Tensor second;
  };

  OptimizerConfig config_;
  std::map<std::string, Slots> slots_;
  std::int64_t step_ = 0;
  bool initialized_ = false;
};

}  // namespace captrans::nn
