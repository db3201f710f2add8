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

#include "captrans/nn/optimizer.hpp"

#include <cmath>

#include "captrans/errors.hpp"

namespace captrans::nn {

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kRmsProp: return "rmsprop";
    case OptimizerKind::kAdaDelta: return "adadelta";
  }
  return "adam";
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "rmsprop") return OptimizerKind::kRmsProp;
  if (s == "adadelta") return OptimizerKind::kAdaDelta;
  throw ConfigError("unknown optimizer '" + s + "' (expected adam, rmsprop or adadelta)");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate >= 1e-5 && learning_rate <= 1.0)) {
    throw ConfigError("learning rate must be in [1e-5, 1.0], got " + std::to_string(learning_rate));
  }
  if (!(weight_decay >= 1e-10 && weight_decay <= 0.1)) {
    throw ConfigError("weight decay must be in [1e-10, 0.1], got " + std::to_string(weight_decay));
  }
  if (!(max_grad_norm >= 1.0 && max_grad_norm <= 1000.0)) {
    throw ConfigError("max gradient norm must be in [1, 1000], got " + std::to_string(max_grad_norm));
  }
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::init(const ParamStore& store) {
  slots_.clear();
  for (const auto& [name, p] : store) {
    if (!p.trainable) continue;
    slots_.emplace(name, Slots{Tensor(p.value.shape()), Tensor(p.value.shape())});
  }
  step_ = 0;
  initialized_ = true;
}

void Optimizer::step(ParamStore& store) {
  if (!initialized_) throw StateError("optimizer step before init");
  ++step_;
  const double lr = config_.learning_rate;
  const double decay = config_.weight_decay;
  for (auto& [name, p] : store) {
    if (!p.trainable) continue;
    auto it = slots_.find(name);
    if (it == slots_.end() || it->second.first.shape() != p.value.shape()) {
      throw StateError("optimizer state does not match parameter " + name);
    }
    auto w = p.value.values();
    auto grad = p.grad.values();
    auto m = it->second.first.values();
    auto v = it->second.second.values();
    switch (config_.kind) {
      case OptimizerKind::kAdam: {
        const double b1 = config_.adam_beta1;
        const double b2 = config_.adam_beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double g = grad[i] + decay * w[i];
          const double mi = b1 * m[i] + (1.0 - b1) * g;
          const double vi = b2 * v[i] + (1.0 - b2) * g * g;
          m[i] = static_cast<float>(mi);
          v[i] = static_cast<float>(vi);
          const double mhat = mi / c1;
          const double vhat = vi / c2;
          w[i] = static_cast<float>(w[i] - lr * mhat / (std::sqrt(vhat) + config_.adam_epsilon));
        }
        break;
      }
      case OptimizerKind::kRmsProp: {
        const double rho = config_.rmsprop_decay;
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double g = grad[i] + decay * w[i];
          const double vi = rho * v[i] + (1.0 - rho) * g * g;
          v[i] = static_cast<float>(vi);
          w[i] = static_cast<float>(w[i] - lr * g / (std::sqrt(vi) + config_.rmsprop_epsilon));
        }
        break;
      }
      case OptimizerKind::kAdaDelta: {
        // first = running E[g^2], second = running E[dx^2]
        const double rho = config_.adadelta_rho;
        const double eps = config_.adadelta_epsilon;
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double g = grad[i] + decay * w[i];
          const double eg = rho * m[i] + (1.0 - rho) * g * g;
          const double dx = -std::sqrt(v[i] + eps) / std::sqrt(eg + eps) * g;
          m[i] = static_cast<float>(eg);
          v[i] = static_cast<float>(rho * v[i] + (1.0 - rho) * dx * dx);
          w[i] = static_cast<float>(w[i] + lr * dx);
        }
        break;
      }
    }
  }
}

}  // namespace captrans::nn
