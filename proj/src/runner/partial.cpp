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

#include "captrans/runner/partial.hpp"

#include <chrono>
#include <iostream>
#include <memory>

#include "captrans/errors.hpp"
#include "captrans/lm/perplexity.hpp"
#include "captrans/runner/grid.hpp"

namespace captrans::runner {

nlohmann::json PartialRow::to_json() const {
  nlohmann::json j = result.to_json();
  j["n_epochs"] = n_epochs;
  j["attempt"] = attempt;
  j["improving"] = improving;
  j["overfit_epoch"] = overfit_epoch;
  return j;
}

PartialRow PartialRow::from_json(const nlohmann::json& j) {
  PartialRow r;
  r.result = ResultRow::from_json(j);
  r.n_epochs = j.at("n_epochs").get<int>();
  r.attempt = j.at("attempt").get<int>();
  r.improving = j.at("improving").get<bool>();
  r.overfit_epoch = j.at("overfit_epoch").get<int>();
  return r;
}

const std::vector<std::string>& partial_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = result_columns();
    c.insert(c.end() - 1, {"n_epochs", "attempt", "improving", "overfit_epoch"});
    return c;
  }();
  return cols;
}

std::vector<std::string> partial_fields(const PartialRow& r) {
  std::vector<std::string> f = result_fields(r.result);
  f.insert(f.end() - 1, {std::to_string(r.n_epochs), std::to_string(r.attempt), r.improving ? "true" : "false",
                         std::to_string(r.overfit_epoch)});
  return f;
}

namespace {

using Clock = std::chrono::steady_clock;

// One LM training run that can be advanced an epoch at a time.
struct LmRun {
  LmRun(const text::Corpus& train, const text::Vocabulary& vocab, const LmSettings& s)
      : settings(s),
        model(lm::LanguageModel::create(vocab, s.embed_size, s.rnn_size, s.init)),
        optimizer(s.train.optimizer) {
    optimizer.init(model.params());
    for (const auto& sent : train.sentences) encoded.push_back(text::encode_sentence(sent, model.vocab()));
  }

  LmSettings settings;
  lm::LanguageModel model;
  nn::Optimizer optimizer;
  std::vector<std::vector<int>> encoded;
  int epochs = 0;
  std::vector<double> val;  // val[e] after e epochs
  int improving_until = 0;  // last epoch e with val[e] < val[e-1] throughout

  bool improving_at(int n) const { return improving_until >= n; }

  void advance_to(int n, const text::Corpus& val_corpus) {
    if (val.empty()) val.push_back(lm::perplexity_geometric(model, val_corpus));
    while (epochs < n) {
      ++epochs;
      lm::train_lm_epoch(model, encoded, optimizer, settings.train, epochs);
      val.push_back(lm::perplexity_geometric(model, val_corpus));
      if (improving_until == epochs - 1 && val[static_cast<std::size_t>(epochs)] < val[static_cast<std::size_t>(epochs - 1)]) {
        improving_until = epochs;
      }
    }
  }
};

}  // namespace

PartialSummary run_partial_training(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                    bool resume) {
  if (config.partial.rows.empty()) throw ConfigError("the experiment config defines no partial-training rows");
  ExperimentContext ctx(config);
  ctx.dataset();
  ctx.features();
  ctx.caption_vocab();
  ctx.embeddings();
  for (RowType t : config.partial.rows) {
    ctx.hyperparams(t);
    ctx.lm_train(t);
    ctx.lm_val(t);
  }

  Ledger ledger(out_dir / "partial_ledger.jsonl", resume);
  const std::vector<capgen::TransferMode> modes = {capgen::TransferMode::kFrozen, capgen::TransferMode::kFineTuned};
  const double size = config.partial.size;
  auto key_of = [&](RowType t, int repeat, int n, capgen::TransferMode m) {
    return to_string(t) + "/n" + std::to_string(n) + "/" + capgen::to_string(m) + "/r" + std::to_string(repeat);
  };

  std::vector<std::string> order;
  for (RowType type : config.partial.rows) {
    const Hyperparams& hp = ctx.hyperparams(type);
    if (!hp.lm) throw ConfigError("hyperparameters of row " + to_string(type) + " have no lm section");
    for (int repeat = 0; repeat < config.repeats; ++repeat) {
      bool all_done = true;
      for (int n = 0; n <= config.partial.max_epoch; ++n) {
        for (auto m : modes) {
          order.push_back(key_of(type, repeat, n, m));
          all_done = all_done && ledger.done(order.back());
        }
      }
      if (all_done) continue;

      const std::uint64_t base_seed = lm_seed(config.seed, type, size, repeat);
      const text::Corpus sub = text::subsample_corpus(ctx.lm_train(type), size, nn::derive_seed(base_seed, "subsample"),
                                                      config.size_base);
      const text::Vocabulary vocab = text::build_vocabulary(sub, config.min_count);
      const text::Corpus& val = ctx.lm_val(type);
      auto new_run = [&](int attempt) {
        return std::make_unique<LmRun>(sub, vocab,
                                       lm_settings(*hp.lm, nn::derive_seed(base_seed, "partial-attempt", {attempt})));
      };

      std::vector<std::unique_ptr<LmRun>> runs;
      runs.push_back(new_run(0));
      std::size_t active = 0;
      int overfit_epoch = -1;
      for (int n = 0; n <= config.partial.max_epoch; ++n) {
        if (overfit_epoch < 0) {
          for (;;) {
            runs[active]->advance_to(n, val);
            if (runs[active]->improving_at(n)) break;
            if (static_cast<int>(runs.size()) < config.partial.max_attempts) {
              runs.push_back(new_run(static_cast<int>(runs.size())));
              active = runs.size() - 1;
              continue;
            }
            overfit_epoch = n;
            // Continue the attempt that kept improving longest (first on ties).
            active = 0;
            for (std::size_t a = 1; a < runs.size(); ++a) {
              if (runs[a]->improving_until > runs[active]->improving_until) active = a;
            }
            std::cerr << "[partial] " << to_string(type) << " repeat " << repeat << ": every attempt peaked before epoch "
                      << n << '\n';
            break;
          }
        }
        LmRun& run = *runs[active];
        run.advance_to(n, val);

        std::optional<LmOutcome> lm_out;
        for (auto mode : modes) {
          const std::string key = key_of(type, repeat, n, mode);
          if (ledger.done(key)) continue;
          if (!lm_out) {
            lm_out = evaluate_source_lm(ctx, type, run.model);
            lm_out->corpus_size = sub.size();
            lm_out->epochs = n;
          }
          const auto t0 = Clock::now();
          PartialRow row;
          row.n_epochs = n;
          row.attempt = static_cast<int>(active);
          row.improving = run.improving_at(n);
          row.overfit_epoch = overfit_epoch;
          ResultRow& r = row.result;
          r.type = to_string(type);
          r.mode = capgen::to_string(mode);
          r.frozen = mode == capgen::TransferMode::kFrozen;
          r.size_exponent = size;
          r.corpus_size = lm_out->corpus_size;
          r.repeat = repeat;
          r.seed = nn::derive_seed(config.seed, "partial:" + key);
          r.lm_val_perplexity = lm_out->val_perplexity;
          r.lm_fair_perplexity = lm_out->fair_perplexity;
          r.lm_epochs = n;
          try {
            std::cerr << "[partial] " << key << '\n';
            const CapgenSettings settings = capgen_settings(hp.capgen, r.seed);
            auto model = make_caption_generator(ctx, settings, &run.model, mode);
            const CaptionOutcome cap = train_and_score(ctx, model, settings, &run.model);
            r.capgen_epochs = cap.epochs;
            r.test_perplexity = cap.test_perplexity;
            r.test_fair_perplexity = cap.test_fair_perplexity;
            r.cider = cap.cider;
            r.wmd = cap.wmd;
          } catch (const std::exception& e) {
            r.status = "failed";
            r.error = e.what();
            std::cerr << "[partial] " << key << " failed: " << r.error << '\n';
          }
          r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
          ledger.record(key, row.to_json());
        }
      }
    }
  }

  PartialSummary summary;
  std::vector<std::vector<std::string>> csv;
  for (const auto& key : order) {
    PartialRow r = PartialRow::from_json(ledger.get(key));
    if (r.result.status != "ok") ++summary.failures;
    csv.push_back(partial_fields(r));
    summary.rows.push_back(std::move(r));
  }
  write_csv(out_dir / "partial.csv", partial_columns(), csv);
  return summary;
}

}  // namespace captrans::runner
