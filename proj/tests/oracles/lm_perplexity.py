# Copyright 2026 The captrans Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

"""Perplexity of a fixed GRU language model, computed position by position.

Vocabulary: <edge> <unk> a b c d (V = 6), E = 4, H = 3, weights from
common.pattern. Corpus (already encoded):
  a b c           -> [0, 2, 3, 4, 0]
  d zz            -> [0, 5, 1, 0]         zz is out of vocabulary
  qq rr qq        -> [0, 1, 1, 1, 0]      two OOV types, three occurrences
Corpus word types: a b c d zz qq rr = 7; known content types = 4, so U = 3.
"""
import numpy as np

from common import gru_step, lm_params, log_softmax

V, E, H = 6, 4, 3
p = lm_params(V, E, H)
sentences = [[0, 2, 3, 4, 0], [0, 5, 1, 0], [0, 1, 1, 1, 0]]
U = 3


def scores(sent):
    h = np.zeros(H)
    out = []
    for t in range(len(sent) - 1):
        h = gru_step(p["embedding"][sent[t]], h, p)
        lp = log_softmax(h @ p["softmax.w"] + p["softmax.b"])
        out.append((lp[sent[t + 1]], sent[t + 1]))
    return out


total = 0.0
fair_total = 0.0
count = 0
sentence_ppl = []
for s in sentences:
    sc = scores(s)
    total += sum(lp for lp, _ in sc)
    fair_total += sum(lp - (np.log(U) if tgt == 1 else 0.0) for lp, tgt in sc)
    count += len(sc)
    sentence_ppl.append(np.exp(-sum(lp for lp, _ in sc) / len(sc)))
print("token perplexity =", repr(float(np.exp(-total / count))))
print("fair perplexity (U=3) =", repr(float(np.exp(-fair_total / count))))
print("sentence-mode perplexity =", repr(float(np.exp(np.mean(np.log(sentence_ppl))))))
print("first sentence log-probs =", [repr(float(lp)) for lp, _ in scores(sentences[0])])
