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

#include "captrans/runner/cli.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "captrans/capgen/decode.hpp"
#include "captrans/capgen/train.hpp"
#include "captrans/capgen/transfer.hpp"
#include "captrans/errors.hpp"
#include "captrans/hyperopt/tuner.hpp"
#include "captrans/lm/perplexity.hpp"
#include "captrans/metrics/cider.hpp"
#include "captrans/metrics/report.hpp"
#include "captrans/metrics/wmd.hpp"
#include "captrans/nn/checkpoint.hpp"
#include "captrans/runner/experiment.hpp"
#include "captrans/runner/grid.hpp"
#include "captrans/runner/hyperparams.hpp"
#include "captrans/runner/partial.hpp"
#include "captrans/runner/plot_data.hpp"
#include "captrans/runner/synthetic.hpp"

namespace captrans::runner {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  bool resume = false;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
  fs::path out_dir() const {
    if (out.empty()) throw ConfigError("--out is required");
    return out;
  }
  ExperimentConfig experiment() const {
    if (config.empty()) throw ConfigError("--config <experiment.json> is required");
    ExperimentConfig c = ExperimentConfig::load(config);
    if (seed) c.seed = *seed;
    return c;
  }
};

text::Corpus load_corpus(const std::string& file, bool raw) {
  if (!fs::exists(file)) throw DataError("corpus " + file + " not found");
  return raw ? text::read_raw_corpus(file, text::CorpusSource::kOther) : text::read_corpus(file);
}

text::CaptionDataset load_dataset(const std::string& file) {
  if (!fs::exists(file)) throw DataError("dataset " + file + " not found");
  return text::read_caption_dataset(file);
}

text::FeatureStore load_features(const std::string& file) {
  if (!fs::exists(file)) throw DataError("features " + file + " not found");
  return text::FeatureStore::read(file);
}

bool is_caption_generator(const fs::path& dir) {
  const auto cfg = nn::read_json_file(dir / "config.json");
  return cfg.value("kind", "") == "caption_generator";
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------- commands

struct SynthArgs {
  SyntheticConfig config;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  SyntheticConfig c = a.config;
  c.seed = g.seed_or(c.seed);
  const auto task = make_synthetic_task(c);
  write_synthetic_task(task, c, g.out_dir());
  std::cout << "wrote synthetic task with " << task.dataset.items.size() << " images to " << g.out << '\n';
  return 0;
}

struct PreprocessArgs {
  std::string input;
  std::string output;
  std::size_t max_length = 0;
};

int cmd_preprocess(const Globals& g, const PreprocessArgs& a) {
  if (!fs::exists(a.input)) throw DataError("input " + a.input + " not found");
  text::ReadStats stats;
  text::Corpus c = text::read_raw_corpus(a.input, text::CorpusSource::kOther, &stats);
  const std::size_t before = c.size();
  if (a.max_length > 0) c = text::filter_by_length(c, a.max_length);
  const fs::path out = !a.output.empty() ? fs::path(a.output) : g.out_dir() / "corpus.txt";
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  text::write_corpus(out, c);
  print_json({{"lines", stats.lines},
              {"dropped_empty", stats.dropped_empty},
              {"dropped_long", before - c.size()},
              {"sentences", c.size()},
              {"output", out.string()}});
  return 0;
}

struct VocabArgs {
  std::string corpus;
  std::string dataset;
  bool raw = false;
  std::size_t min_count = 5;
  std::string intersect;
  std::string output;
};

int cmd_build_vocab(const Globals& g, const VocabArgs& a) {
  text::Corpus corpus;
  if (!a.dataset.empty()) {
    corpus = load_dataset(a.dataset).captions(text::Split::kTrain);
  } else if (!a.corpus.empty()) {
    corpus = load_corpus(a.corpus, a.raw);
  } else {
    throw ConfigError("build-vocab needs --corpus or --dataset");
  }
  text::Vocabulary v = text::build_vocabulary(corpus, a.min_count);
  if (!a.intersect.empty()) v = text::intersect_vocabulary(text::Vocabulary::load(a.intersect), v);
  const fs::path out = !a.output.empty() ? fs::path(a.output) : g.out_dir() / "vocab.json";
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  v.save(out);
  print_json({{"size", v.size()}, {"content_size", v.content_size()}, {"output", out.string()}});
  return 0;
}

struct TrainLmArgs {
  std::string train;
  std::string val;
  bool raw = false;
  std::string hyperparams;
  std::optional<double> size;
  std::size_t size_base = 30000;
  std::size_t min_count = 5;
};

int cmd_train_lm(const Globals& g, const TrainLmArgs& a) {
  const Hyperparams hp = Hyperparams::load(a.hyperparams);
  if (!hp.lm) throw ConfigError(a.hyperparams + " has no lm section");
  const std::uint64_t seed = g.seed_or(0);
  text::Corpus train = load_corpus(a.train, a.raw);
  const text::Corpus val = load_corpus(a.val, a.raw);
  if (a.size) train = text::subsample_corpus(train, *a.size, nn::derive_seed(seed, "subsample"), a.size_base);
  const LmSettings s = lm_settings(*hp.lm, seed);
  auto model = lm::LanguageModel::create(text::build_vocabulary(train, a.min_count), s.embed_size, s.rnn_size, s.init);
  const auto history = lm::train_lm(model, train, val, s.train, [](const lm::EpochRecord& r) {
    std::cerr << "epoch " << r.epoch << " loss " << r.train_loss << " val perplexity " << r.val_perplexity << '\n';
  });
  const fs::path out = g.out_dir();
  model.save(out);
  history.write_csv(out / "history.csv");
  nn::write_json_file(out / "history.json", history.to_json());
  print_json({{"selected_epoch", history.selected_epoch},
              {"early_stopped", history.early_stopped},
              {"val_perplexity", val.empty() ? 0.0 : lm::perplexity_geometric(model, val)},
              {"vocab_size", model.vocab_size()},
              {"checkpoint_hash", nn::checkpoint_hash(out)}});
  return 0;
}

struct CapgenInputs {
  std::string dataset;
  std::string features;
  std::string hyperparams;
  std::size_t min_count = 5;
};

capgen::CaptionGenerator fresh_capgen(const CapgenInputs& in, const CapgenSettings& s, const text::CaptionDataset& ds,
                                      const text::FeatureStore& feats, const lm::LanguageModel* source,
                                      capgen::TransferMode mode) {
  const text::Vocabulary cap_vocab = text::build_vocabulary(ds.captions(text::Split::kTrain), in.min_count);
  capgen::CaptionModelConfig mc;
  mc.embed_size = source ? source->embed_size() : s.embed_size;
  mc.rnn_size = source ? source->rnn_size() : s.rnn_size;
  mc.feature_size = feats.dim();
  mc.post_image_size = s.post_image_size;
  mc.post_image_activation = s.post_image_activation;
  mc.normalize_image = s.normalize_image;
  mc.init = s.init;
  auto model = capgen::CaptionGenerator::create(
      source ? text::intersect_vocabulary(source->vocab(), cap_vocab) : cap_vocab, mc);
  if (source) capgen::transfer_prefix_params(*source, model, mode);
  return model;
}

struct TransferArgs {
  CapgenInputs in;
  std::string lm;
  std::string mode = "frozen";
};

int cmd_transfer(const Globals& g, const TransferArgs& a) {
  const auto mode = capgen::parse_transfer_mode(a.mode);
  if (mode == capgen::TransferMode::kNone) throw ConfigError("transfer needs --mode frozen or fine-tuned");
  const Hyperparams hp = Hyperparams::load(a.in.hyperparams);
  const CapgenSettings s = capgen_settings(hp.capgen, g.seed_or(0));
  const auto ds = load_dataset(a.in.dataset);
  const auto feats = load_features(a.in.features);
  const auto source = lm::LanguageModel::load(a.lm);
  auto model = fresh_capgen(a.in, s, ds, feats, &source, mode);
  model.save(g.out_dir());
  print_json({{"mode", capgen::to_string(mode)},
              {"source_hash", model.transfer().source_hash},
              {"vocab_size", model.vocab().size()}});
  return 0;
}

struct TrainCapgenArgs {
  CapgenInputs in;
  std::string from;
  std::string lm;
  std::string mode = "fine-tuned";
};

int cmd_train_capgen(const Globals& g, const TrainCapgenArgs& a) {
  const Hyperparams hp = Hyperparams::load(a.in.hyperparams);
  const CapgenSettings s = capgen_settings(hp.capgen, g.seed_or(0));
  const auto ds = load_dataset(a.in.dataset);
  const auto feats = load_features(a.in.features);
  std::optional<capgen::CaptionGenerator> model;
  if (!a.from.empty()) {
    model = capgen::CaptionGenerator::load(a.from);
  } else if (!a.lm.empty()) {
    const auto source = lm::LanguageModel::load(a.lm);
    model = fresh_capgen(a.in, s, ds, feats, &source, capgen::parse_transfer_mode(a.mode));
  } else {
    model = fresh_capgen(a.in, s, ds, feats, nullptr, capgen::TransferMode::kNone);
  }
  const auto history = capgen::train_capgen(*model, ds, feats, s.train, [](const lm::EpochRecord& r) {
    std::cerr << "epoch " << r.epoch << " loss " << r.train_loss << " val perplexity " << r.val_perplexity << '\n';
  });
  const fs::path out = g.out_dir();
  model->save(out);
  history.write_csv(out / "history.csv");
  nn::write_json_file(out / "history.json", history.to_json());
  print_json({{"selected_epoch", history.selected_epoch},
              {"early_stopped", history.early_stopped},
              {"transfer", capgen::to_string(model->transfer().mode)},
              {"checkpoint_hash", nn::checkpoint_hash(out)}});
  return 0;
}

struct GenerateArgs {
  std::string model;
  std::string dataset;
  std::string features;
  std::string split = "test";
  std::size_t beam = 1;
  std::size_t max_length = 50;
  std::string output;
};

int cmd_generate(const Globals& g, const GenerateArgs& a) {
  // Check arguments before the expensive loads.
  const capgen::GenerationConfig gc{a.beam, a.max_length};
  gc.validate();
  const text::Split split = text::parse_split(a.split);
  const auto model = capgen::CaptionGenerator::load(a.model);
  const auto ds = load_dataset(a.dataset);
  const auto feats = load_features(a.features);
  const auto items = ds.items_in(split);
  const auto captions = capgen::generate_captions(model, items, feats, gc);
  const fs::path out = !a.output.empty() ? fs::path(a.output) : g.out_dir() / "generations.jsonl";
  capgen::write_generations(out, captions);
  std::cout << "wrote " << captions.size() << " captions to " << out.string() << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string generations;
  std::string dataset;
  std::string split = "test";
  std::string embeddings;
  std::string model;
  std::string output;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const auto ds = load_dataset(a.dataset);
  const auto split = text::parse_split(a.split);
  if (!fs::exists(a.generations)) throw DataError("generations " + a.generations + " not found");
  const auto candidates = capgen::as_candidates(capgen::read_generations(a.generations));
  const auto refs = metrics::references(ds, split);
  std::vector<metrics::MetricRow> rows;
  const auto cider = metrics::cider_score(candidates, refs);
  rows.push_back({"cider", a.split, cider.score, cider.per_image.size(), 0});
  std::optional<metrics::WordEmbeddingTable> emb;
  if (!a.embeddings.empty()) {
    if (!fs::exists(a.embeddings)) throw DataError("embeddings " + a.embeddings + " not found");
    emb = metrics::WordEmbeddingTable::read(a.embeddings);
  } else if (!a.model.empty()) {
    const auto ckpt = nn::read_checkpoint(a.model);
    const auto vocab = text::Vocabulary::load(fs::path(a.model) / ckpt.config.value("vocab", "vocab.json"));
    emb = metrics::WordEmbeddingTable::from_model(vocab, ckpt.params.value(lm::kEmbeddingParam));
  }
  if (emb) {
    const auto wmd = metrics::wmd_similarity_report(candidates, refs, *emb);
    rows.push_back({"wmd", a.split, wmd.value, wmd.n_images, wmd.n_skipped});
  } else {
    std::cerr << "warning: no embeddings given (--embeddings or --model); WMD not computed\n";
  }
  const fs::path out = !a.output.empty() ? fs::path(a.output) : g.out_dir() / "report.csv";
  metrics::write_metric_report(out, rows);
  for (const auto& r : rows) std::cout << r.metric << ' ' << metrics::format_double(r.value) << '\n';
  return 0;
}

struct PerplexityArgs {
  std::string model;
  std::string corpus;
  bool raw = false;
  std::string dataset;
  std::string features;
  std::string split = "test";
  std::string mode = "token";
  bool fair = false;
  std::optional<std::size_t> eval_types;
};

int cmd_perplexity(const Globals&, const PerplexityArgs& a) {
  const auto mode = a.mode == "token" ? lm::PerplexityMode::kToken
                    : a.mode == "sentence"
                        ? lm::PerplexityMode::kSentence
                        : throw ConfigError("--mode must be token or sentence");
  nlohmann::json out;
  if (is_caption_generator(a.model)) {
    const auto model = capgen::CaptionGenerator::load(a.model);
    const auto ds = load_dataset(a.dataset);
    const auto feats = load_features(a.features);
    const auto split = text::parse_split(a.split);
    const auto scores = capgen::score_captions(model, ds.items_in(split), feats);
    out["perplexity"] = lm::perplexity_from_scores(scores, mode);
    if (a.fair) {
      const std::size_t u = lm::unknown_type_count(ds.captions(split), model.vocab());
      out["unknown_types"] = u;
      out["fair_perplexity"] = lm::perplexity_from_scores(scores, mode, static_cast<double>(std::max<std::size_t>(u, 1)));
    }
  } else {
    const auto model = lm::LanguageModel::load(a.model);
    const auto corpus = load_corpus(a.corpus, a.raw);
    out["perplexity"] = lm::perplexity_geometric(model, corpus, mode);
    if (a.fair) {
      if (a.eval_types) {
        out["fair_perplexity"] = lm::fair_perplexity(model, corpus, *a.eval_types, mode);
      } else {
        const std::size_t u = lm::unknown_type_count(corpus, model.vocab());
        out["unknown_types"] = u;
        out["fair_perplexity"] = lm::fair_perplexity_with_unknown_types(model, corpus, u, mode);
      }
    }
  }
  print_json(out);
  return 0;
}

struct TuneArgs {
  std::string row;
  std::string target = "lm";
  std::string space;
  hyperopt::TunerConfig tuner;
};

int cmd_tune(const Globals& g, const TuneArgs& a) {
  const ExperimentConfig config = g.experiment();
  const RowType type = parse_row_type(a.row);
  const bool tune_lm = a.target == "lm";
  if (!tune_lm && a.target != "capgen") throw ConfigError("--target must be lm or capgen");
  if (tune_lm && type == RowType::kNoTransfer) throw ConfigError("the no-transfer row has no language model");
  ExperimentContext ctx(config);
  const Hyperparams& hp = ctx.hyperparams(type);
  const hyperopt::ParamSpace space =
      !a.space.empty() ? hyperopt::ParamSpace::from_json(nn::read_json_file(a.space))
                       : (tune_lm ? hyperopt::lm_space() : hyperopt::capgen_space(type != RowType::kNoTransfer));
  hyperopt::TunerConfig tc = a.tuner;
  tc.seed = config.seed;
  const fs::path out = g.out_dir();
  fs::create_directories(out);

  // Tuning runs at size multiple 10^0 with frozen transfer.
  std::optional<lm::LanguageModel> source;
  if (!tune_lm && type != RowType::kNoTransfer) source = train_source_lm(ctx, type, 0.0, 0, nullptr);

  hyperopt::Objective objective;
  if (tune_lm) {
    objective = [&](const hyperopt::HyperPoint& p, std::size_t trial) {
      const nlohmann::json settings = merge_point(*hp.lm, p);
      const std::uint64_t seed = nn::derive_seed(config.seed, "tune-lm", {static_cast<std::int64_t>(trial)});
      const text::Corpus sub = text::subsample_corpus(ctx.lm_train(type), 0.0, nn::derive_seed(config.seed, "tune-subsample"),
                                                      config.size_base);
      const LmSettings s = lm_settings(settings, seed);
      auto model = lm::LanguageModel::create(text::build_vocabulary(sub, config.min_count), s.embed_size, s.rnn_size, s.init);
      lm::train_lm(model, sub, ctx.lm_val(type), s.train);
      return lm::perplexity_geometric(model, ctx.lm_val(type));
    };
  } else {
    objective = [&](const hyperopt::HyperPoint& p, std::size_t trial) {
      const CapgenSettings s = capgen_settings(merge_point(hp.capgen, p),
                                               nn::derive_seed(config.seed, "tune-capgen", {static_cast<std::int64_t>(trial)}));
      auto model = make_caption_generator(ctx, s, source ? &*source : nullptr, capgen::TransferMode::kFrozen);
      capgen::train_capgen(model, ctx.dataset(), ctx.features(), s.train);
      const auto val = ctx.dataset().items_in(text::Split::kVal);
      const auto cands = capgen::as_candidates(capgen::generate_captions(model, val, ctx.features(), s.generation));
      const auto refs = metrics::references(ctx.dataset(), text::Split::kVal);
      const metrics::WordEmbeddingTable* fixed = ctx.embeddings();
      std::optional<metrics::WordEmbeddingTable> own;
      if (!fixed) {
        const auto& m = source ? source->params() : model.params();
        own = metrics::WordEmbeddingTable::from_model(source ? source->vocab() : model.vocab(), m.value(lm::kEmbeddingParam));
        fixed = &*own;
      }
      return -metrics::wmd_similarity_report(cands, refs, *fixed).value;
    };
  }
  nn::write_json_file(out / "space.json", space.to_json());
  const auto result = hyperopt::tune(objective, space, tc, out / "history.jsonl", g.resume);
  Hyperparams best = hp;
  if (tune_lm) {
    best.lm = merge_point(*hp.lm, result.best.point);
  } else {
    best.capgen = merge_point(hp.capgen, result.best.point);
  }
  nn::write_json_file(out / "best_hyperparams.json", best.to_json());
  std::size_t failed = 0;
  for (const auto& r : result.history) failed += r.status == hyperopt::TrialStatus::kFailed;
  print_json({{"best_fitness", result.best.fitness},
              {"best_trial", result.best.index},
              {"trials", result.history.size()},
              {"failed", failed},
              {"best_point", hyperopt::point_to_json(result.best.point)}});
  return failed ? static_cast<int>(ExitCode::kTrialFailures) : 0;
}

struct GridArgs {
  bool no_models = false;
  std::vector<std::string> rows;
};

int cmd_grid(const Globals& g, const GridArgs& a) {
  GridOptions o;
  o.resume = g.resume;
  o.save_models = !a.no_models;
  for (const auto& r : a.rows) o.only_rows.push_back(parse_row_type(r));
  const auto summary = run_grid(g.experiment(), g.out_dir(), o);
  std::cout << summary.rows.size() << " result rows (" << summary.computed << " computed, " << summary.failures
            << " failed) in " << (g.out_dir() / "results.csv").string() << '\n';
  return summary.failures ? static_cast<int>(ExitCode::kTrialFailures) : 0;
}

int cmd_partial(const Globals& g) {
  const auto summary = run_partial_training(g.experiment(), g.out_dir(), g.resume);
  std::cout << summary.rows.size() << " partial-training rows (" << summary.failures << " failed) in "
            << (g.out_dir() / "partial.csv").string() << '\n';
  return summary.failures ? static_cast<int>(ExitCode::kTrialFailures) : 0;
}

struct PlotArgs {
  std::string results;
  std::string figure;
  std::string output;
  std::string metric = "wmd";
};

int cmd_plot(const Globals& g, const PlotArgs& a) {
  const Figure f = parse_figure(a.figure);
  const fs::path out = !a.output.empty() ? fs::path(a.output) : g.out_dir() / (a.figure + ".tsv");
  const std::size_t n = emit_plot_data(a.results, f, out, a.metric);
  std::cout << "wrote " << n << " rows to " << out.string() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Transfer of language-model prefix encoders into merge-architecture caption generators"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Base random seed");
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--resume", g.resume, "Continue from the ledger or tuning history in --out");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write the templated synthetic captioning task");
  c_synth->add_option("--items", synth.config.items);
  c_synth->add_option("--val-items", synth.config.val_items);
  c_synth->add_option("--test-items", synth.config.test_items);
  c_synth->add_option("--feature-dim", synth.config.feature_dim);
  c_synth->add_option("--feature-noise", synth.config.feature_noise);
  c_synth->add_option("--text-sentences", synth.config.text_sentences);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Clean a raw text corpus (one sentence per line)");
  c_pre->add_option("--input", pre.input)->required();
  c_pre->add_option("--output", pre.output);
  c_pre->add_option("--max-length", pre.max_length, "Drop sentences with more tokens (0 keeps all)");

  VocabArgs voc;
  auto* c_voc = app.add_subcommand("build-vocab", "Build a vocabulary from a corpus or caption dataset");
  c_voc->add_option("--corpus", voc.corpus);
  c_voc->add_option("--dataset", voc.dataset, "Use the training captions of a dataset");
  c_voc->add_flag("--raw", voc.raw, "The corpus is raw text");
  c_voc->add_option("--min-count", voc.min_count);
  c_voc->add_option("--intersect", voc.intersect, "Language model vocabulary to intersect with");
  c_voc->add_option("--output", voc.output);

  TrainLmArgs tlm;
  auto* c_tlm = app.add_subcommand("train-lm", "Train a language model with early stopping");
  c_tlm->add_option("--train", tlm.train)->required();
  c_tlm->add_option("--val", tlm.val)->required();
  c_tlm->add_flag("--raw", tlm.raw);
  c_tlm->add_option("--hyperparams", tlm.hyperparams)->required();
  auto* size_opt = c_tlm->add_option("--size", "Size exponent x: subsample round(10^x * size-base) sentences");
  c_tlm->add_option("--size-base", tlm.size_base);
  c_tlm->add_option("--min-count", tlm.min_count);

  TransferArgs tr;
  auto* c_tr = app.add_subcommand("transfer", "Create a caption generator with prefix parameters from a language model");
  c_tr->add_option("--lm", tr.lm)->required();
  c_tr->add_option("--dataset", tr.in.dataset)->required();
  c_tr->add_option("--features", tr.in.features)->required();
  c_tr->add_option("--hyperparams", tr.in.hyperparams)->required();
  c_tr->add_option("--mode", tr.mode, "frozen or fine-tuned");
  c_tr->add_option("--min-count", tr.in.min_count);

  TrainCapgenArgs tc;
  auto* c_tc = app.add_subcommand("train-capgen", "Train a caption generator");
  c_tc->add_option("--dataset", tc.in.dataset)->required();
  c_tc->add_option("--features", tc.in.features)->required();
  c_tc->add_option("--hyperparams", tc.in.hyperparams)->required();
  c_tc->add_option("--from", tc.from, "Start from a caption generator checkpoint (e.g. made by transfer)");
  c_tc->add_option("--lm", tc.lm, "Transfer from this language model first");
  c_tc->add_option("--mode", tc.mode, "Transfer mode with --lm");
  c_tc->add_option("--min-count", tc.in.min_count);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Beam-search captions for a dataset split");
  c_gen->add_option("--model", gen.model)->required();
  c_gen->add_option("--dataset", gen.dataset)->required();
  c_gen->add_option("--features", gen.features)->required();
  c_gen->add_option("--split", gen.split);
  c_gen->add_option("--beam", gen.beam);
  c_gen->add_option("--max-length", gen.max_length);
  c_gen->add_option("--output", gen.output);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score generated captions with CIDEr and WMD");
  c_ev->add_option("--generations", ev.generations)->required();
  c_ev->add_option("--dataset", ev.dataset)->required();
  c_ev->add_option("--split", ev.split);
  c_ev->add_option("--embeddings", ev.embeddings, "EMBT word vectors for WMD");
  c_ev->add_option("--model", ev.model, "Use this checkpoint's embedding table for WMD");
  c_ev->add_option("--output", ev.output);

  PerplexityArgs px;
  auto* c_px = app.add_subcommand("perplexity", "Perplexity of a language model or caption generator");
  c_px->add_option("--model", px.model)->required();
  c_px->add_option("--corpus", px.corpus);
  c_px->add_flag("--raw", px.raw);
  c_px->add_option("--dataset", px.dataset);
  c_px->add_option("--features", px.features);
  c_px->add_option("--split", px.split);
  c_px->add_option("--mode", px.mode, "token or sentence");
  c_px->add_flag("--fair", px.fair, "Also report the vocabulary-corrected perplexity");
  auto* types_opt = c_px->add_option("--eval-types", "Word types of the evaluation vocabulary");

  TuneArgs tu;
  auto* c_tu = app.add_subcommand("tune", "Random-forest/EI hyperparameter search for one row");
  c_tu->add_option("--row", tu.row)->required();
  c_tu->add_option("--target", tu.target, "lm or capgen");
  c_tu->add_option("--space", tu.space, "Search space JSON (default: the full tuning ranges)");
  c_tu->add_option("--n-init", tu.tuner.n_init);
  c_tu->add_option("--n-iter", tu.tuner.n_iter);
  c_tu->add_option("--candidates", tu.tuner.candidates);
  c_tu->add_option("--trees", tu.tuner.forest.trees);

  GridArgs gr;
  auto* c_gr = app.add_subcommand("grid", "Run the experiment grid");
  c_gr->add_flag("--no-models", gr.no_models, "Do not keep model checkpoints");
  c_gr->add_option("--rows", gr.rows, "Restrict to these row types")->delimiter(',');

  auto* c_pa = app.add_subcommand("partial", "Run the partial-training protocol");

  PlotArgs pl;
  auto* c_pl = app.add_subcommand("plot-data", "Emit plot-ready TSV from results");
  c_pl->add_option("--results", pl.results)->required();
  c_pl->add_option("--figure", pl.figure)->required();
  c_pl->add_option("--output", pl.output);
  c_pl->add_option("--metric", pl.metric);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }
  if (seed_opt->count()) g.seed = seed;
  if (size_opt->count()) tlm.size = size_opt->as<double>();
  if (types_opt->count()) px.eval_types = types_opt->as<std::size_t>();

  try {
    if (c_synth->parsed()) return cmd_synth(g, synth);
    if (c_pre->parsed()) return cmd_preprocess(g, pre);
    if (c_voc->parsed()) return cmd_build_vocab(g, voc);
    if (c_tlm->parsed()) return cmd_train_lm(g, tlm);
    if (c_tr->parsed()) return cmd_transfer(g, tr);
    if (c_tc->parsed()) return cmd_train_capgen(g, tc);
    if (c_gen->parsed()) return cmd_generate(g, gen);
    if (c_ev->parsed()) return cmd_evaluate(g, ev);
    if (c_px->parsed()) return cmd_perplexity(g, px);
    if (c_tu->parsed()) return cmd_tune(g, tu);
    if (c_gr->parsed()) return cmd_grid(g, gr);
    if (c_pa->parsed()) return cmd_partial(g);
    if (c_pl->parsed()) return cmd_plot(g, pl);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kConfig);
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("captrans");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace captrans::runner
