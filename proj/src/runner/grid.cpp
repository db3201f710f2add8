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

#include "captrans/runner/grid.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "captrans/errors.hpp"

namespace captrans::runner {

Ledger::Ledger(const std::filesystem::path& file, bool resume) : file_(file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  if (resume && std::filesystem::exists(file)) {
    std::ifstream in(file, std::ios::binary);
    std::string line;
    std::vector<std::string> good;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("row");
        good.push_back(line);
      } catch (const nlohmann::json::exception&) {
        break;
      }
    }
    // Rewrite without a torn tail so later appends start on a clean line.
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    for (const auto& l : good) out << l << '\n';
  } else {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + file.string());
  }
}

void Ledger::record(const std::string& key, const nlohmann::json& row) {
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to " + file_.string());
  out << nlohmann::json{{"key", key}, {"row", row}}.dump() << '\n';
  out.flush();
  entries_[key] = row;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw DataError("results have no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw DataError(file.string() + " is empty");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = split(line);
    if (r.size() != t.columns.size()) throw DataError(file.string() + ": row with wrong field count");
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::vector<TrialSpec> enumerate_trials(const ExperimentConfig& config, const std::vector<RowType>& only_rows) {
  std::vector<TrialSpec> out;
  for (const auto& row : config.rows) {
    if (!only_rows.empty() && std::find(only_rows.begin(), only_rows.end(), row.type) == only_rows.end()) continue;
    const std::vector<double> sizes = row.type == RowType::kNoTransfer ? std::vector<double>{0.0} : row.sizes;
    for (double size : sizes) {
      for (int r = 0; r < config.repeats; ++r) {
        for (auto mode : row.modes) out.push_back(TrialSpec{row.type, size, mode, r});
      }
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path model_dir(const std::filesystem::path& out, const TrialSpec& s) {
  std::filesystem::path p = out / "models" / to_string(s.type);
  if (s.type != RowType::kNoTransfer) p /= "size" + format_size(s.size);
  return p / ("r" + std::to_string(s.repeat));
}

ResultRow base_row(const TrialSpec& s, std::uint64_t seed) {
  ResultRow r;
  r.type = to_string(s.type);
  r.mode = capgen::to_string(s.mode);
  r.frozen = s.mode == capgen::TransferMode::kFrozen;
  r.size_exponent = s.size;
  r.repeat = s.repeat;
  r.seed = seed;
  return r;
}

}  // namespace

GridSummary run_grid(const ExperimentConfig& config, const std::filesystem::path& out_dir, const GridOptions& options) {
  ExperimentContext ctx(config);
  const auto trials = enumerate_trials(config, options.only_rows);
  if (trials.empty()) throw ConfigError("the experiment defines no trials");

  // Resolve every input up front so a missing file is fatal, not a trial failure.
  ctx.dataset();
  ctx.features();
  ctx.caption_vocab();
  ctx.embeddings();
  for (const auto& t : trials) {
    ctx.hyperparams(t.type);
    if (t.type != RowType::kNoTransfer) {
      ctx.lm_train(t.type);
      ctx.lm_val(t.type);
    }
  }

  Ledger ledger(out_dir / "ledger.jsonl", options.resume);
  GridSummary summary;

  std::size_t i = 0;
  while (i < trials.size()) {
    // Group the modes that share one source LM.
    std::size_t j = i;
    while (j < trials.size() && trials[j].type == trials[i].type && trials[j].size == trials[i].size &&
           trials[j].repeat == trials[i].repeat) {
      ++j;
    }
    std::vector<const TrialSpec*> pending;
    for (std::size_t k = i; k < j; ++k) {
      if (!ledger.done(trials[k].key())) pending.push_back(&trials[k]);
    }
    if (!pending.empty()) {
      const TrialSpec& first = *pending.front();
      const auto lm_t0 = Clock::now();
      std::optional<lm::LanguageModel> source;
      LmOutcome lm_out;
      std::string lm_error;
      if (first.type != RowType::kNoTransfer) {
        try {
          std::cerr << "[grid] " << to_string(first.type) << " size " << format_size(first.size) << " repeat "
                    << first.repeat << ": training language model\n";
          source = train_source_lm(ctx, first.type, first.size, first.repeat, &lm_out);
          if (options.save_models) source->save(model_dir(out_dir, first) / "lm");
        } catch (const std::exception& e) {
          lm_error = e.what();
        }
      }
      const double lm_seconds = seconds_since(lm_t0);
      for (const TrialSpec* spec : pending) {
        const auto t0 = Clock::now();
        const std::uint64_t seed = trial_seed(config.seed, *spec);
        ResultRow row = base_row(*spec, seed);
        row.corpus_size = lm_out.corpus_size;
        row.lm_val_perplexity = lm_out.val_perplexity;
        row.lm_fair_perplexity = lm_out.fair_perplexity;
        row.lm_epochs = lm_out.epochs;
        if (!lm_error.empty()) {
          row.status = "failed";
          row.error = "language model: " + lm_error;
        } else {
          try {
            std::cerr << "[grid] " << spec->key() << ": training caption generator\n";
            const CapgenSettings settings = capgen_settings(ctx.hyperparams(spec->type).capgen, seed);
            auto model = make_caption_generator(ctx, settings, source ? &*source : nullptr, spec->mode);
            const auto dir = options.save_models ? model_dir(out_dir, *spec) / capgen::to_string(spec->mode)
                                                 : std::filesystem::path{};
            const CaptionOutcome cap = train_and_score(ctx, model, settings, source ? &*source : nullptr, dir);
            row.capgen_epochs = cap.epochs;
            row.test_perplexity = cap.test_perplexity;
            row.test_fair_perplexity = cap.test_fair_perplexity;
            row.cider = cap.cider;
            row.wmd = cap.wmd;
          } catch (const std::exception& e) {
            row.status = "failed";
            row.error = e.what();
          }
        }
        // The LM's time is charged to the first cell that used it.
        row.wall_seconds = seconds_since(t0) + (spec == pending.front() ? lm_seconds : 0.0);
        if (row.status != "ok") std::cerr << "[grid] " << spec->key() << " failed: " << row.error << '\n';
        ledger.record(spec->key(), row.to_json());
        ++summary.computed;
      }
    }
    i = j;
  }

  std::vector<std::vector<std::string>> csv;
  for (const auto& t : trials) {
    ResultRow r = ResultRow::from_json(ledger.get(t.key()));
    if (r.status != "ok") ++summary.failures;
    csv.push_back(result_fields(r));
    summary.rows.push_back(std::move(r));
  }
  write_csv(out_dir / "results.csv", result_columns(), csv);
  return summary;
}

}  // namespace captrans::runner
