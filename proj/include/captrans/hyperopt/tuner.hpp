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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "captrans/hyperopt/forest.hpp"
#include "captrans/hyperopt/space.hpp"

namespace captrans::hyperopt {

enum class TrialStatus { kOk, kFailed };

struct TrialRecord {
  std::size_t index = 0;
  HyperPoint point;
  double fitness = 0.0;  // lower is better
  TrialStatus status = TrialStatus::kOk;
  std::string error;
  /// "random" for initial points, "ei" for guided ones.
  std::string source;
};

struct TunerConfig {
  std::size_t n_init = 32;
  std::size_t n_iter = 64;
  std::size_t candidates = 1000;
  ForestConfig forest;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Returns the fitness of a point; throwing or returning a non-finite value
/// marks the trial failed.
using Objective = std::function<double(const HyperPoint&, std::size_t trial)>;

struct TuneResult {
  TrialRecord best;
  std::vector<TrialRecord> history;
};

/// Sequential model-based optimisation: n_init random points, then n_iter
/// rounds that fit a forest on the successful trials, score `candidates`
/// random points by expected improvement and evaluate the best one. Failed
/// trials stay in the history but never enter a fit. A round with fewer than
/// two successful trials falls back to a random point.
///
/// Every random draw is seeded from (seed, trial index), so a run resumed from
/// a partial history continues exactly as the uninterrupted run would.
/// With `history_file` set, each trial is appended as one JSON line as soon
/// as it finishes; `resume` reads the trials already there first.
TuneResult tune(const Objective& objective, const ParamSpace& space, const TunerConfig& config,
                const std::filesystem::path& history_file = {}, bool resume = false);

/// Point chosen for trial `index` given the trials before it.
HyperPoint suggest(const ParamSpace& space, const TunerConfig& config, const std::vector<TrialRecord>& history,
                   std::size_t index);

nlohmann::json trial_to_json(const TrialRecord& r);
TrialRecord trial_from_json(const nlohmann::json& j, const ParamSpace& space);
/// Trial lines of a history file; the leading config line is skipped.
std::vector<TrialRecord> read_history(const std::filesystem::path& file, const ParamSpace& space);

}  // namespace captrans::hyperopt
