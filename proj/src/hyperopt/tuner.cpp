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

#include "captrans/hyperopt/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "captrans/errors.hpp"
#include "captrans/hyperopt/acquisition.hpp"

namespace captrans::hyperopt {

void TunerConfig::validate() const {
  if (n_init + n_iter == 0) throw ConfigError("tuning budget must be at least one evaluation");
  if (n_iter > 0 && candidates == 0) throw ConfigError("candidate pool must not be empty");
  forest.validate();
}

nlohmann::json TunerConfig::to_json() const {
  return {{"kind", "tuner-config"},
          {"n_init", n_init},
          {"n_iter", n_iter},
          {"candidates", candidates},
          {"acquisition", "expected-improvement"},
          {"forest", {{"trees", forest.trees}, {"min_leaf", forest.min_leaf}, {"bootstrap", forest.bootstrap}}},
          {"seed", seed}};
}

nlohmann::json trial_to_json(const TrialRecord& r) {
  nlohmann::json j = {{"kind", "trial"},
                      {"index", r.index},
                      {"source", r.source},
                      {"status", r.status == TrialStatus::kOk ? "ok" : "failed"},
                      {"point", point_to_json(r.point)}};
  if (r.status == TrialStatus::kOk) {
    j["fitness"] = r.fitness;
  } else {
    j["fitness"] = nullptr;
    j["error"] = r.error;
  }
  return j;
}

TrialRecord trial_from_json(const nlohmann::json& j, const ParamSpace& space) {
  TrialRecord r;
  try {
    r.index = j.at("index").get<std::size_t>();
    r.source = j.value("source", "");
    r.point = point_from_json(j.at("point"), space);
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.status = TrialStatus::kOk;
      r.fitness = j.at("fitness").get<double>();
    } else if (status == "failed") {
      r.status = TrialStatus::kFailed;
      r.error = j.value("error", "");
    } else {
      throw DataError("unknown trial status '" + status + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed trial record: ") + e.what());
  }
  return r;
}

std::vector<TrialRecord> read_history(const std::filesystem::path& file, const ParamSpace& space) {
  std::vector<TrialRecord> out;
  std::ifstream in(file, std::ios::binary);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      // A torn final line from an interrupted write is dropped.
      break;
    }
    if (j.value("kind", "") == "trial") out.push_back(trial_from_json(j, space));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].index != i) throw DataError(file.string() + ": trial indices are not consecutive");
  }
  return out;
}

HyperPoint suggest(const ParamSpace& space, const TunerConfig& config, const std::vector<TrialRecord>& history,
                   std::size_t index) {
  if (index < config.n_init) {
    nn::Rng rng(nn::derive_seed(config.seed, "tuner-init", {static_cast<std::int64_t>(index)}));
    return random_point(space, rng);
  }
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& r : history) {
    if (r.status != TrialStatus::kOk) continue;
    x.push_back(space.encode(r.point));
    y.push_back(r.fitness);
  }
  nn::Rng rng(nn::derive_seed(config.seed, "tuner-pool", {static_cast<std::int64_t>(index)}));
  if (x.size() < 2) return random_point(space, rng);

  ForestConfig fc = config.forest;
  fc.seed = nn::derive_seed(config.seed, "tuner-forest", {static_cast<std::int64_t>(index)});
  const ForestSurrogate forest = ForestSurrogate::fit(x, y, fc);
  const double best = *std::min_element(y.begin(), y.end());

  HyperPoint chosen;
  double chosen_ei = -1.0;
  for (std::size_t c = 0; c < config.candidates; ++c) {
    HyperPoint p = random_point(space, rng);
    const Prediction pred = forest.predict(space.encode(p));
    const double ei = expected_improvement(pred.mean, pred.std, best);
    if (ei > chosen_ei) {
      chosen_ei = ei;
      chosen = std::move(p);
    }
  }
  return chosen;
}

TuneResult tune(const Objective& objective, const ParamSpace& space, const TunerConfig& config,
                const std::filesystem::path& history_file, bool resume) {
  config.validate();
  if (space.size() == 0) throw ConfigError("search space is empty");
  const std::size_t budget = config.n_init + config.n_iter;

  TuneResult result;
  std::ofstream log;
  if (!history_file.empty()) {
    if (resume && std::filesystem::exists(history_file)) {
      result.history = read_history(history_file, space);
      if (result.history.size() > budget) throw DataError("history holds more trials than the budget");
      // Rewrite so a torn last line does not survive.
      log.open(history_file, std::ios::binary | std::ios::trunc);
      log << config.to_json().dump() << '\n';
      for (const auto& r : result.history) log << trial_to_json(r).dump() << '\n';
    } else {
      if (history_file.has_parent_path()) std::filesystem::create_directories(history_file.parent_path());
      log.open(history_file, std::ios::binary | std::ios::trunc);
      log << config.to_json().dump() << '\n';
    }
    if (!log) throw DataError("cannot write " + history_file.string());
    log.flush();
  }

  for (std::size_t i = result.history.size(); i < budget; ++i) {
    TrialRecord r;
    r.index = i;
    r.source = i < config.n_init ? "random" : "ei";
    r.point = suggest(space, config, result.history, i);
    try {
      r.fitness = objective(r.point, i);
      if (!std::isfinite(r.fitness)) {
        r.status = TrialStatus::kFailed;
        r.error = "non-finite fitness";
      }
    } catch (const std::exception& e) {
      r.status = TrialStatus::kFailed;
      r.error = e.what();
    }
    if (r.status == TrialStatus::kFailed) {
      r.fitness = 0.0;
      std::cerr << "warning: trial " << i << " failed: " << r.error << '\n';
    }
    if (log.is_open()) {
      log << trial_to_json(r).dump() << '\n';
      log.flush();
    }
    result.history.push_back(std::move(r));
  }

  const TrialRecord* best = nullptr;
  for (const auto& r : result.history) {
    if (r.status == TrialStatus::kOk && (!best || r.fitness < best->fitness)) best = &r;
  }
  if (!best) throw StateError("every tuning trial failed");
  result.best = *best;
  return result;
}

}  // namespace captrans::hyperopt
