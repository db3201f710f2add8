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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "captrans/errors.hpp"
#include "captrans/hyperopt/acquisition.hpp"
#include "captrans/hyperopt/forest.hpp"
#include "captrans/hyperopt/space.hpp"
#include "captrans/hyperopt/tuner.hpp"
#include "captrans/nn/rng.hpp"
#include "test_util.hpp"

namespace captrans::hyperopt {
namespace {

using testing::TempDir;

ParamSpace quadratic_space() {
  return ParamSpace({Dimension::linear("x", -2.0, 2.0), Dimension::linear("y", -2.0, 2.0)});
}

double quadratic(const HyperPoint& p, std::size_t) {
  const double x = get_double(p, "x"), y = get_double(p, "y");
  return (x - 0.7) * (x - 0.7) + 2.0 * (y + 0.4) * (y + 0.4);
}

TunerConfig small_tuner(std::uint64_t seed) {
  TunerConfig c;
  c.n_init = 5;
  c.n_iter = 10;
  c.candidates = 200;
  c.forest.trees = 20;
  c.seed = seed;
  return c;
}

// ------------------------------------------------------------------ space

TEST(Space, DegenerateSpaceHasOnePoint) {
  const ParamSpace s({Dimension::integer("n", 4, 4), Dimension::categorical("opt", {"adam"})});
  nn::Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto p = random_point(s, rng);
    EXPECT_EQ(get_int(p, "n"), 4);
    EXPECT_EQ(get_string(p, "opt"), "adam");
  }
}

TEST(Space, LogUniformMedian) {
  const ParamSpace s({Dimension::log("lr", 1e-4, 1e-1)});
  nn::Rng rng(2);
  std::vector<double> v;
  for (int i = 0; i < 5001; ++i) v.push_back(get_double(random_point(s, rng), "lr"));
  std::nth_element(v.begin(), v.begin() + 2500, v.end());
  // The log-scale midpoint is about 3.16e-3.
  EXPECT_GT(v[2500], 2e-3);
  EXPECT_LT(v[2500], 5e-3);
  EXPECT_GE(*std::min_element(v.begin(), v.end()), 1e-4);
  EXPECT_LE(*std::max_element(v.begin(), v.end()), 1e-1);
}

TEST(Space, DrawsAreDeterministicAndInBounds) {
  const auto s = default_space();
  nn::Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_point(s, a);
    EXPECT_TRUE(s.contains(p));
    EXPECT_EQ(point_to_json(p), point_to_json(random_point(s, b)));
    EXPECT_EQ(s.encode(p).size(), s.encoded_size());
  }
}

TEST(Space, JsonRoundTrip) {
  const auto s = capgen_space(false);
  const auto back = ParamSpace::from_json(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
  nn::Rng rng(4);
  const auto p = random_point(s, rng);
  EXPECT_EQ(point_to_json(point_from_json(point_to_json(p), s)), point_to_json(p));
  EXPECT_TRUE(capgen_space(false).size() > capgen_space(true).size());
}

TEST(Space, Validation) {
  EXPECT_THROW(ParamSpace({Dimension::linear("x", 1.0, 1.0)}), ConfigError);
  EXPECT_THROW(ParamSpace({Dimension::log("x", 0.0, 1.0)}), ConfigError);
  EXPECT_THROW(ParamSpace({Dimension::categorical("c", {})}), ConfigError);
  EXPECT_THROW(ParamSpace({Dimension::linear("x", 0, 1), Dimension::linear("x", 0, 1)}), ConfigError);
  HyperPoint out = {{"x", 3.0}, {"y", 0.0}};
  EXPECT_FALSE(quadratic_space().contains(out));
  EXPECT_THROW(point_from_json(point_to_json(out), quadratic_space()), ConfigError);
}

// ----------------------------------------------------------------- forest

TEST(Forest, ConstantTargets) {
  const std::vector<std::vector<double>> x = {{0.0}, {1.0}, {2.0}, {3.0}};
  const std::vector<double> y(4, 1.5);
  const auto f = ForestSurrogate::fit(x, y, ForestConfig{10, 1, true, 3});
  for (double q : {-1.0, 0.5, 2.5, 9.0}) {
    const auto p = f.predict(std::vector<double>{q});
    EXPECT_EQ(p.mean, 1.5);
    EXPECT_EQ(p.std, 0.0);
  }
}

TEST(Forest, SeparableSplit) {
  const std::vector<std::vector<double>> x = {{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}};
  const std::vector<double> y = {0.0, 0.0, 0.0, 10.0, 10.0, 10.0};
  const auto f = ForestSurrogate::fit(x, y, ForestConfig{5, 2, false, 1});
  EXPECT_EQ(f.predict(std::vector<double>{0.5}).mean, 0.0);
  EXPECT_EQ(f.predict(std::vector<double>{4.5}).mean, 10.0);
  EXPECT_EQ(f.predict(std::vector<double>{4.5}).std, 0.0);
}

TEST(Forest, LearnsASmoothFunction) {
  nn::Rng rng(12);
  std::vector<std::vector<double>> x, xt;
  std::vector<double> y, yt;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    (i < 150 ? x : xt).push_back({a, b});
    (i < 150 ? y : yt).push_back(std::sin(a) + 0.5 * b);
  }
  const auto f = ForestSurrogate::fit(x, y, ForestConfig{50, 2, true, 7});
  double mae = 0.0, mean = 0.0, var = 0.0;
  for (double v : yt) mean += v / static_cast<double>(yt.size());
  for (std::size_t i = 0; i < xt.size(); ++i) {
    mae += std::abs(f.predict(xt[i]).mean - yt[i]) / static_cast<double>(xt.size());
    var += (yt[i] - mean) * (yt[i] - mean) / static_cast<double>(yt.size());
  }
  EXPECT_LT(mae, 0.5 * std::sqrt(var));
}

TEST(Forest, LeavesRespectMinLeaf) {
  nn::Rng rng(3);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({rng.uniform(), rng.uniform()});
    y.push_back(rng.normal());
  }
  const auto f = ForestSurrogate::fit(x, y, ForestConfig{5, 3, false, 1});
  for (const auto& t : f.trees()) {
    for (const auto& n : t.nodes) {
      if (n.feature < 0) {
        EXPECT_GE(n.count, 3u);
      }
    }
  }
  EXPECT_THROW(ForestSurrogate::fit({{0.0}}, std::vector<double>{1.0}, ForestConfig{}), std::exception);
}

// -------------------------------------------------------------------- EI

TEST(ExpectedImprovement, DegenerateStd) {
  EXPECT_EQ(expected_improvement(1.0, 0.0, 3.0), 2.0);
  EXPECT_EQ(expected_improvement(3.0, 0.0, 1.0), 0.0);
  EXPECT_NEAR(expected_improvement(2.0, 1.5, 2.0), 0.3989422804014327 * 1.5, 1e-12);
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  // mean, std, best and a 10^6-draw estimate.
  const double cases[][4] = {{0, 1, 0, 0.3979878412138572},
                             {1, 0.5, 0.7, 0.08429287840855505},
                             {-0.3, 2, 0.4, 1.1998186825467652},
                             {2, 0.3, 2.5, 0.506328263272382},
                             {5, 1.5, 3, 0.06354387220432495}};
  for (const auto& c : cases) {
    const double ei = expected_improvement(c[0], c[1], c[2]);
    EXPECT_NEAR(ei, c[3], 0.01 * c[3]) << c[0] << " " << c[1] << " " << c[2];
  }
}

TEST(ExpectedImprovement, NonNegativeAndGrowsWithStd) {
  for (double mean : {-2.0, 0.0, 0.5, 3.0}) {
    double prev = expected_improvement(mean, 0.0, 0.5);
    for (double s = 0.1; s < 5.0; s += 0.1) {
      const double ei = expected_improvement(mean, s, 0.5);
      EXPECT_GE(ei, 0.0);
      EXPECT_GE(ei, prev - 1e-15);
      prev = ei;
    }
  }
}

// ------------------------------------------------------------------ tuner

TEST(Tuner, SingleEvaluation) {
  TunerConfig c = small_tuner(1);
  c.n_init = 1;
  c.n_iter = 0;
  int calls = 0;
  const auto r = tune([&](const HyperPoint& p, std::size_t t) { ++calls; return quadratic(p, t); }, quadratic_space(), c);
  EXPECT_EQ(calls, 1);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.best.fitness, r.history[0].fitness);
}

TEST(Tuner, RespectsBudgetAndBounds) {
  const auto space = quadratic_space();
  const auto r = tune(quadratic, space, small_tuner(2));
  ASSERT_EQ(r.history.size(), 15u);
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    EXPECT_EQ(r.history[i].index, i);
    EXPECT_TRUE(space.contains(r.history[i].point));
    EXPECT_EQ(r.history[i].source, i < 5 ? "random" : "ei");
    EXPECT_LE(r.best.fitness, r.history[i].fitness);
  }
}

TEST(Tuner, IsDeterministic) {
  const auto a = tune(quadratic, quadratic_space(), small_tuner(3));
  const auto b = tune(quadratic, quadratic_space(), small_tuner(3));
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(trial_to_json(a.history[i]), trial_to_json(b.history[i]));
  const auto c = tune(quadratic, quadratic_space(), small_tuner(4));
  EXPECT_NE(trial_to_json(a.history[0]), trial_to_json(c.history[0]));
}

TEST(Tuner, ResumeContinuesExactly) {
  TempDir dir("tune");
  const auto space = quadratic_space();
  const auto full = tune(quadratic, space, small_tuner(5), dir / "full.jsonl");

  // Keep the config line plus the first 8 trials, as if the run had died.
  std::ifstream in(dir / "full.jsonl");
  std::ofstream cut(dir / "cut.jsonl");
  std::string line;
  for (int i = 0; i < 9 && std::getline(in, line); ++i) cut << line << '\n';
  cut.close();
  std::size_t calls = 0;
  const auto resumed = tune([&](const HyperPoint& p, std::size_t t) { ++calls; return quadratic(p, t); }, space,
                            small_tuner(5), dir / "cut.jsonl", true);
  EXPECT_EQ(calls, 7u);
  ASSERT_EQ(resumed.history.size(), full.history.size());
  for (std::size_t i = 0; i < full.history.size(); ++i) {
    EXPECT_EQ(trial_to_json(resumed.history[i]), trial_to_json(full.history[i])) << i;
  }
  EXPECT_EQ(read_history(dir / "cut.jsonl", space).size(), 15u);
}

TEST(Tuner, FailedTrialsAreRecordedButNeverBest) {
  const auto r = tune(
      [](const HyperPoint& p, std::size_t t) {
        if (t % 3 == 0) throw std::runtime_error("diverged");
        if (t % 3 == 1) return std::nan("");
        return quadratic(p, t);
      },
      quadratic_space(), small_tuner(6));
  std::size_t failed = 0;
  for (const auto& h : r.history) failed += h.status == TrialStatus::kFailed;
  EXPECT_EQ(failed, 10u);
  EXPECT_EQ(r.best.status, TrialStatus::kOk);
  EXPECT_EQ(r.best.index % 3, 2u);
  EXPECT_EQ(r.history[0].error.empty(), false);
}

TEST(Tuner, AllFailedIsAnError) {
  EXPECT_THROW(tune([](const HyperPoint&, std::size_t) -> double { throw std::runtime_error("no"); }, quadratic_space(),
                    small_tuner(1)),
               StateError);
  TunerConfig bad;
  bad.n_init = 0;
  bad.n_iter = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Tuner, BeatsSameBudgetRandomSearch) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TunerConfig c = small_tuner(100 + seed);
    c.n_init = 10;
    c.n_iter = 30;
    const auto r = tune(quadratic, quadratic_space(), c);
    nn::Rng rng(nn::derive_seed(seed, "random-search"));
    double random_best = 1e300;
    for (int i = 0; i < 40; ++i) random_best = std::min(random_best, quadratic(random_point(quadratic_space(), rng), 0));
    wins += r.best.fitness < random_best;
  }
  EXPECT_GE(wins, 4);
}

}  // namespace
}  // namespace captrans::hyperopt
