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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "captrans/errors.hpp"
#include "captrans/runner/cli.hpp"
#include "captrans/runner/experiment.hpp"
#include "captrans/runner/grid.hpp"
#include "captrans/runner/hyperparams.hpp"
#include "captrans/runner/partial.hpp"
#include "captrans/runner/plot_data.hpp"
#include "captrans/runner/synthetic.hpp"
#include "test_util.hpp"

namespace captrans::runner {
namespace {

using nlohmann::json;
using testing::TempDir;

// A small synthetic task with short training budgets.
struct Workbench {
  TempDir dir{"runner"};
  json experiment;

  Workbench(int max_epochs = 3, std::uint64_t seed = 1) {
    SyntheticConfig s;
    s.items = 60;
    s.val_items = 10;
    s.test_items = 10;
    s.feature_dim = 16;
    s.text_sentences = 300;
    s.text_val_sentences = 50;
    s.seed = seed;
    write_synthetic_task(make_synthetic_task(s), s, dir.path());
    experiment = json::parse(std::ifstream(dir / "experiment.json"));
    for (const char* row : {"no-transfer", "same-captions", "different-captions", "general-text"}) {
      const auto file = dir / (std::string("hyperparams/") + row + ".json");
      json hp = json::parse(std::ifstream(file));
      for (auto& [k, v] : hp.items()) {
        v["max_epochs"] = max_epochs;
        v["embed_size"] = 8;
        v["rnn_size"] = 8;
      }
      hp["capgen"]["post_image_size"] = 8;
      std::ofstream(file) << hp.dump(2);
    }
  }

  json& row(const std::string& type) {
    for (auto& r : experiment["rows"]) {
      if (r["type"] == type) return r;
    }
    throw std::runtime_error("no row " + type);
  }
  void set_lm(const std::string& type, const std::string& key, const json& value) {
    const auto file = dir / (std::string("hyperparams/") + type + ".json");
    json hp = json::parse(std::ifstream(file));
    hp["lm"][key] = value;
    std::ofstream(file) << hp.dump(2);
  }
  ExperimentConfig config() const { return ExperimentConfig::from_json(experiment, dir.path()); }
};

std::vector<std::vector<std::string>> without_wall_time(const CsvTable& t) {
  const std::size_t w = t.column("wall_seconds");
  auto rows = t.rows;
  for (auto& r : rows) r.erase(r.begin() + static_cast<std::ptrdiff_t>(w));
  return rows;
}

// ----------------------------------------------------------------- config

TEST(Config, Validation) {
  Workbench wb;
  EXPECT_NO_THROW(wb.config().validate());
  {
    json j = wb.experiment;
    for (auto& r : j["rows"]) {
      if (r["type"] == "same-captions") r["sizes"] = {0.5};
    }
    EXPECT_THROW(ExperimentConfig::from_json(j, wb.dir.path()).validate(), ConfigError);
  }
  {
    json j = wb.experiment;
    for (auto& r : j["rows"]) {
      if (r["type"] == "no-transfer") r["modes"] = {"frozen"};
    }
    EXPECT_THROW(ExperimentConfig::from_json(j, wb.dir.path()).validate(), ConfigError);
  }
  {
    json j = wb.experiment;
    j["repeats"] = 0;
    EXPECT_THROW(ExperimentConfig::from_json(j, wb.dir.path()).validate(), ConfigError);
  }
  {
    json j = wb.experiment;
    j["rows"][1]["sizes"] = {0.25};
    EXPECT_THROW(ExperimentConfig::from_json(j, wb.dir.path()).validate(), ConfigError);
  }
  EXPECT_THROW(parse_row_type("other-captions"), ConfigError);
  EXPECT_THROW(ExperimentConfig::load(wb.dir / "missing.json"), ConfigError);
}

TEST(Config, TrialEnumeration) {
  Workbench wb;
  const auto c = wb.config();
  // no-transfer 1, same 3x2, different 5x2, general 5x2 cells.
  EXPECT_EQ(enumerate_trials(c).size(), 27u * 5u);
  const auto only = enumerate_trials(c, {RowType::kSameCaptions});
  ASSERT_EQ(only.size(), 30u);
  std::set<std::string> keys;
  for (const auto& t : only) keys.insert(t.key());
  EXPECT_EQ(keys.size(), only.size());
  // Frozen and fine-tuned cells share their source LM but not the rest.
  const auto& a = only[0];
  const auto& b = only[1];
  EXPECT_EQ(a.size, b.size);
  EXPECT_NE(a.mode, b.mode);
  EXPECT_EQ(lm_seed(1, a.type, a.size, a.repeat), lm_seed(1, b.type, b.size, b.repeat));
  EXPECT_NE(trial_seed(1, a), trial_seed(1, b));
}

TEST(Baseline, UnigramPerplexityByHand) {
  text::CaptionDataset d;
  auto item = [](std::string id, text::Split split, std::string cap) {
    text::CaptionItem it;
    it.image_id = std::move(id);
    it.split = split;
    it.captions.push_back(text::split_tokens(cap));
    return it;
  };
  d.items = {item("1", text::Split::kTrain, "a b"), item("2", text::Split::kTrain, "a"),
             item("3", text::Split::kTest, "b c")};
  // Add-one counts: edge 3, unk 1, a 3, b 2 of 9; the test caption is b unk edge.
  EXPECT_NEAR(unigram_test_perplexity(d, text::Vocabulary::from_content({"a", "b"})), 4.952890873341939, 1e-12);
}

TEST(Config, FullScalePresetsLoad) {
  const std::filesystem::path dir = std::filesystem::path(CAPTRANS_SOURCE_DIR) / "configs/full-scale";
  const std::map<std::string, std::pair<std::size_t, std::size_t>> lm_sizes = {
      {"same-captions", {502, 201}}, {"different-captions", {255, 427}}, {"general-text", {132, 330}}};
  for (const char* row : {"no-transfer", "same-captions", "different-captions", "general-text"}) {
    const auto hp = Hyperparams::load(dir / (std::string(row) + ".json"));
    const auto cg = capgen_settings(hp.capgen, 1);
    EXPECT_NO_THROW(cg.train.base.optimizer.validate()) << row;
    EXPECT_NO_THROW(cg.generation.validate()) << row;
    if (std::string(row) == "no-transfer") {
      EXPECT_FALSE(hp.lm.has_value());
      EXPECT_EQ(cg.embed_size, 276u);
      EXPECT_EQ(cg.rnn_size, 227u);
      continue;
    }
    ASSERT_TRUE(hp.lm.has_value()) << row;
    const auto lm = lm_settings(*hp.lm, 1);
    EXPECT_EQ(lm.embed_size, lm_sizes.at(row).first) << row;
    EXPECT_EQ(lm.rnn_size, lm_sizes.at(row).second) << row;
    EXPECT_NO_THROW(lm.train.optimizer.validate()) << row;
  }
  const auto exp = ExperimentConfig::from_json(json::parse(std::ifstream(dir / "experiment.json")), dir);
  EXPECT_EQ(enumerate_trials(exp).size(), 27u * 5u);
  EXPECT_EQ(exp.size_base, 30000u);
}

// ------------------------------------------------------------------- grid

TEST(Grid, RepeatsOfOneCell) {
  Workbench wb;
  wb.experiment["repeats"] = 5;
  const auto s = run_grid(wb.config(), wb.dir / "out", GridOptions{false, false, {RowType::kNoTransfer}});
  EXPECT_EQ(s.rows.size(), 5u);
  EXPECT_EQ(s.computed, 5u);
  EXPECT_EQ(s.failures, 0u);
  const auto t = read_csv(wb.dir / "out/results.csv");
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(t.columns.back(), "wall_seconds");
  std::set<std::string> seeds;
  for (const auto& r : t.rows) {
    EXPECT_EQ(r[t.column("status")], "ok");
    EXPECT_GT(std::stod(r[t.column("test_perplexity")]), 1.0);
    seeds.insert(r[t.column("seed")]);
  }
  EXPECT_EQ(seeds.size(), 5u);
}

TEST(Grid, ResumeSkipsFinishedTrials) {
  Workbench wb;
  wb.experiment["repeats"] = 2;
  const GridOptions opts{false, false, {RowType::kNoTransfer}};
  run_grid(wb.config(), wb.dir / "out", opts);
  const auto first = read_csv(wb.dir / "out/results.csv");

  // Simulate a crash that tore the last ledger line.
  std::ofstream(wb.dir / "out/ledger.jsonl", std::ios::app) << "{\"key\": \"no-tra";
  wb.experiment["repeats"] = 3;
  GridOptions resume = opts;
  resume.resume = true;
  const auto s = run_grid(wb.config(), wb.dir / "out", resume);
  EXPECT_EQ(s.computed, 1u);
  EXPECT_EQ(s.rows.size(), 3u);
  const auto second = read_csv(wb.dir / "out/results.csv");
  ASSERT_EQ(second.rows.size(), 3u);
  EXPECT_EQ(second.rows[0], first.rows[0]);
  EXPECT_EQ(second.rows[1], first.rows[1]);
}

TEST(Grid, IsDeterministic) {
  Workbench wb;
  wb.experiment["repeats"] = 1;
  wb.row("same-captions")["sizes"] = {-1.0};
  const GridOptions opts{false, true, {RowType::kNoTransfer, RowType::kSameCaptions}};
  const auto a = run_grid(wb.config(), wb.dir / "a", opts);
  const auto b = run_grid(wb.config(), wb.dir / "b", opts);
  EXPECT_EQ(a.rows.size(), 3u);
  EXPECT_EQ(without_wall_time(read_csv(wb.dir / "a/results.csv")), without_wall_time(read_csv(wb.dir / "b/results.csv")));
  EXPECT_TRUE(std::filesystem::exists(wb.dir / "a/models"));
}

TEST(Grid, FrozenCellKeepsSourceLmLoss) {
  Workbench wb;
  wb.experiment["repeats"] = 1;
  wb.row("same-captions")["sizes"] = {0.0};
  const auto s = run_grid(wb.config(), wb.dir / "out", GridOptions{false, false, {RowType::kSameCaptions}});
  ASSERT_EQ(s.rows.size(), 2u);
  // Both cells report the same source LM.
  EXPECT_EQ(s.rows[0].lm_val_perplexity, s.rows[1].lm_val_perplexity);
  EXPECT_NE(s.rows[0].frozen, s.rows[1].frozen);
  EXPECT_EQ(s.rows[0].corpus_size, s.rows[1].corpus_size);
}

TEST(Grid, MissingInputAborts) {
  Workbench wb;
  wb.experiment["dataset"] = "nowhere.jsonl";
  EXPECT_THROW(run_grid(wb.config(), wb.dir / "out", GridOptions{false, false, {RowType::kNoTransfer}}), DataError);
}

// ---------------------------------------------------------------- partial

TEST(Partial, RowsForEveryEpoch) {
  Workbench wb;
  wb.experiment["repeats"] = 1;
  wb.experiment["partial"]["max_epoch"] = 2;
  const auto s = run_partial_training(wb.config(), wb.dir / "out");
  ASSERT_EQ(s.rows.size(), 6u);  // n = 0, 1, 2 times frozen and fine-tuned
  for (const auto& r : s.rows) EXPECT_EQ(r.result.lm_epochs, r.n_epochs);
  const auto t = read_csv(wb.dir / "out/partial.csv");
  EXPECT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.columns.back(), "wall_seconds");
}

TEST(Partial, DivergingLmRecordsOverfitEpoch) {
  Workbench wb;
  wb.experiment["repeats"] = 1;
  wb.experiment["partial"]["max_epoch"] = 3;
  wb.experiment["partial"]["max_attempts"] = 2;
  // A learning rate this large wrecks the LM within an epoch or two.
  wb.set_lm("same-captions", "learning_rate", 1.0);
  wb.set_lm("same-captions", "max_grad_norm", 1000.0);
  const auto s = run_partial_training(wb.config(), wb.dir / "out");
  ASSERT_FALSE(s.rows.empty());
  const int overfit = s.rows.back().overfit_epoch;
  EXPECT_GE(overfit, 1);
  // Rows before the failure carry no overfit marker.
  for (const auto& r : s.rows) {
    if (r.n_epochs >= overfit) {
      EXPECT_EQ(r.overfit_epoch, overfit);
      EXPECT_FALSE(r.improving);
    } else {
      EXPECT_EQ(r.overfit_epoch, -1);
      EXPECT_TRUE(r.improving);
    }
  }
}

// -------------------------------------------------------------- plot data

void write_results(const std::filesystem::path& file, const std::vector<ResultRow>& rows) {
  std::vector<std::vector<std::string>> fields;
  for (const auto& r : rows) fields.push_back(result_fields(r));
  write_csv(file, result_columns(), fields);
}

ResultRow result(const std::string& type, const std::string& mode, double size, double wmd, int repeat) {
  ResultRow r;
  r.type = type;
  r.mode = mode;
  r.frozen = mode == "frozen";
  r.size_exponent = size;
  r.corpus_size = static_cast<std::size_t>(1000 * std::pow(10.0, size));
  r.repeat = repeat;
  r.wmd = wmd;
  r.lm_fair_perplexity = 20.0 + size;
  return r;
}

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

TEST(PlotData, MeanAndSampleStd) {
  TempDir dir("plot");
  std::vector<ResultRow> rows;
  const double v[] = {0.42, 0.47, 0.39, 0.51, 0.44};
  for (int i = 0; i < 5; ++i) rows.push_back(result("general-text", "frozen", 0.0, v[i], i));
  rows.push_back(result("general-text", "frozen", 1.0, 0.3, 0));
  auto failed = result("general-text", "frozen", 1.0, 99.0, 1);
  failed.status = "failed";
  rows.push_back(failed);
  write_results(dir / "r.csv", rows);
  EXPECT_EQ(emit_plot_data(dir / "r.csv", Figure::kWmdBySize, dir / "p.tsv"), 2u);
  const auto t = read_tsv(dir / "p.tsv");
  ASSERT_GE(t.size(), 2u);
  const auto& line = t[t.size() - 2];
  EXPECT_EQ(line[0], "general-text/frozen");
  EXPECT_NEAR(std::stod(line[2]), 0.446, 1e-12);
  EXPECT_NEAR(std::stod(line[3]), 0.046151923036857306, 1e-12);
  EXPECT_EQ(line[4], "5");
  EXPECT_EQ(std::stod(t.back()[3]), 0.0);  // a single value has std 0
}

TEST(PlotData, ScatterHasOneLinePerCell) {
  TempDir dir("plot");
  std::vector<ResultRow> rows;
  for (double size : {-1.0, 0.0, 1.0}) {
    for (const char* mode : {"frozen", "fine-tuned"}) {
      for (int rep = 0; rep < 3; ++rep) rows.push_back(result("different-captions", mode, size, 0.4, rep));
    }
  }
  rows.push_back(result("no-transfer", "none", 0.0, 0.4, 0));
  write_results(dir / "r.csv", rows);
  EXPECT_EQ(emit_plot_data(dir / "r.csv", Figure::kPplxVsWmd, dir / "p.tsv"), 6u);
}

TEST(PlotData, EmptyResultsAreAnError) {
  TempDir dir("plot");
  write_results(dir / "r.csv", {});
  EXPECT_THROW(emit_plot_data(dir / "r.csv", Figure::kWmdBySize, dir / "p.tsv"), DataError);
  EXPECT_THROW(parse_figure("fig9"), ConfigError);
}

// -------------------------------------------------------------------- CLI

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  const std::string out = dir.path().string();
  EXPECT_EQ(run_cli({"--out", out, "synth", "--items", "30", "--val-items", "5", "--test-items", "5",
                     "--text-sentences", "100"}),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "captions.jsonl"));
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli({"--help"}), 0);
  EXPECT_EQ(run_cli({"build-vocab", "--corpus", out + "/absent.txt", "--output", out + "/v.json"}), 3);
  EXPECT_EQ(run_cli({"generate", "--model", out + "/absent", "--dataset", out + "/captions.jsonl", "--features",
                     out + "/features.bin", "--beam", "9"}),
            2);
}

TEST(Cli, VocabularyFromDataset) {
  TempDir dir("cli");
  const std::string out = dir.path().string();
  ASSERT_EQ(run_cli({"--out", out, "synth", "--items", "30", "--val-items", "5", "--test-items", "5",
                     "--text-sentences", "100"}),
            0);
  ASSERT_EQ(run_cli({"build-vocab", "--dataset", out + "/captions.jsonl", "--min-count", "3", "--output",
                     out + "/vocab.json"}),
            0);
  const auto v = text::Vocabulary::load(dir / "vocab.json");
  EXPECT_GT(v.size(), 2u);
  EXPECT_EQ(v.token(0), "<edge>");
}

}  // namespace
}  // namespace captrans::runner
