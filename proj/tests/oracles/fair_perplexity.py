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

"""Fair perplexity with a context-free model (zero softmax weights).

With softmax.w = 0 the next-token distribution is softmax(b) at every
position. Vocabulary <edge> <unk> the cat dog; b = [0.2, 1.1, 0.5, -0.3, 0.0].
Corpus:
  the cat               -> [E, the, cat, E]
  the zebra             -> [E, the, UNK, E]
  gnu dog okapi         -> [E, UNK, dog, UNK, E]
Evaluation types: the cat dog zebra gnu okapi = 6, model knows 3, U = 3.
"""
import math

b = [0.2, 1.1, 0.5, -0.3, 0.0]
z = sum(math.exp(v) for v in b)
logp = [v - math.log(z) for v in b]
targets = [[2, 3, 0], [2, 1, 0], [1, 4, 1, 0]]
U = 3
n = sum(len(t) for t in targets)
std = sum(logp[t] for s in targets for t in s)
fair = sum(logp[t] - (math.log(U) if t == 1 else 0.0) for s in targets for t in s)
print("standard =", repr(math.exp(-std / n)))
print("fair =", repr(math.exp(-fair / n)))
