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

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include "captrans/errors.hpp"

namespace captrans::capgen {

struct GenerationConfig {
  std::size_t beam_width = 1;
  std::size_t max_length = 50;

  void validate() const {
    if (beam_width < 1 || beam_width > 5) throw ConfigError("beam width must be in [1, 5]");
    if (max_length < 1) throw ConfigError("max_length must be positive");
  }
};

struct Hypothesis {
  std::vector<int> tokens;  // content tokens, boundary tokens excluded
  double log_prob = 0.0;
  bool complete = false;
};

/// Anything that can score next tokens from a decoder state. `start()` is the
/// state after reading the initial boundary token.
template <class M>
concept StepModel = requires(const M& m, const typename M::State& s, int token) {
  { m.start() } -> std::convertible_to<typename M::State>;
  { m.log_probs(s) } -> std::convertible_to<std::vector<double>>;
  { m.advance(s, token) } -> std::convertible_to<typename M::State>;
};

namespace detail {

// Higher score first; equal scores fall back to the lexicographically smaller
// token sequence.
inline bool ranks_before(double sa, const std::vector<int>& ta, double sb, const std::vector<int>& tb) {
  if (sa != sb) return sa > sb;
  return ta < tb;
}

}  // namespace detail

/// Beam search with summed log-probabilities and no length normalisation. A
/// hypothesis that emits `edge` is complete. Each step keeps the best
/// beam_width expansions; completed ones leave the beam. Search ends when the
/// beam is empty, when no live hypothesis can still beat the best completed
/// one, or after max_length content tokens. Returns the best completed
/// hypothesis, or the best truncated one if none completed.
template <StepModel M>
Hypothesis beam_search(const M& model, const GenerationConfig& config, int edge = 0) {
  config.validate();
  struct Live {
    std::vector<int> tokens;
    double score;
    typename M::State state;
  };
  struct Candidate {
    std::size_t parent;
    int token;
    double score;
  };

  std::vector<Live> live;
  live.push_back(Live{{}, 0.0, model.start()});
  std::vector<Hypothesis> finished;

  auto best_finished = [&]() -> const Hypothesis* {
    const Hypothesis* best = nullptr;
    for (const auto& h : finished) {
      if (!best || detail::ranks_before(h.log_prob, h.tokens, best->log_prob, best->tokens)) best = &h;
    }
    return best;
  };

  for (std::size_t step = 0; step < config.max_length && !live.empty(); ++step) {
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const std::vector<double> lp = model.log_probs(live[i].state);
      for (std::size_t tok = 0; tok < lp.size(); ++tok) {
        // Zero-probability expansions are impossible captions, never beam entries.
        if (std::isinf(lp[tok]) && lp[tok] < 0) continue;
        candidates.push_back(Candidate{i, static_cast<int>(tok), live[i].score + lp[tok]});
      }
    }
    const std::size_t keep = std::min(config.beam_width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [&live](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        // Live hypotheses share one length, so this is the
                        // lexicographic order of the extended sequences.
                        const auto& pa = live[a.parent].tokens;
                        const auto& pb = live[b.parent].tokens;
                        if (pa != pb) return pa < pb;
                        return a.token < b.token;
                      });
    std::vector<Live> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = candidates[k];
      std::vector<int> tokens = live[c.parent].tokens;
      if (c.token == edge) {
        finished.push_back(Hypothesis{std::move(tokens), c.score, true});
      } else {
        tokens.push_back(c.token);
        next.push_back(Live{std::move(tokens), c.score, model.advance(live[c.parent].state, c.token)});
      }
    }
    live = std::move(next);
    // Scores only decrease with length, so a completed hypothesis at least as
    // good as every live one cannot be beaten.
    if (const Hypothesis* best = best_finished()) {
      const bool any_better = std::any_of(live.begin(), live.end(), [&](const Live& l) {
        return l.score > best->log_prob;
      });
      if (!any_better) break;
    }
  }

  if (const Hypothesis* best = best_finished()) return *best;
  const Live* best_live = nullptr;
  for (const auto& l : live) {
    if (!best_live || detail::ranks_before(l.score, l.tokens, best_live->score, best_live->tokens)) best_live = &l;
  }
  if (!best_live) return Hypothesis{};
  return Hypothesis{best_live->tokens, best_live->score, false};
}

/// Argmax decoding (smallest index wins ties); the reference for width 1.
template <StepModel M>
Hypothesis greedy_decode(const M& model, std::size_t max_length, int edge = 0) {
  Hypothesis h;
  auto state = model.start();
  for (std::size_t step = 0; step < max_length; ++step) {
    const std::vector<double> lp = model.log_probs(state);
    const auto best = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    h.log_prob += lp[static_cast<std::size_t>(best)];
    if (best == edge) {
      h.complete = true;
      return h;
    }
    h.tokens.push_back(best);
    state = model.advance(state, best);
  }
  return h;
}

}  // namespace captrans::capgen
