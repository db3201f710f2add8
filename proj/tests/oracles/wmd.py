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

"""Word mover's distance by linear programming (scipy), unequal lengths.

2-d embeddings; distributions are normalised bag-of-words counts.
"""
import numpy as np
from scipy.optimize import linprog

emb = {
    "a": (0.0, 0.0), "dog": (1.0, 2.0), "cat": (1.5, 1.5), "runs": (3.0, -1.0),
    "sits": (2.5, -0.5), "grass": (-1.0, 1.0), "mat": (-0.5, 0.5),
}


def wmd(x, y):
    # Tokens without a vector are dropped before normalising.
    x = [w for w in x if w in emb]
    y = [w for w in y if w in emb]
    xs, ys = sorted(set(x)), sorted(set(y))
    px = np.array([x.count(w) for w in xs], float) / len(x)
    py = np.array([y.count(w) for w in ys], float) / len(y)
    C = np.array([[np.linalg.norm(np.subtract(emb[a], emb[b])) for b in ys] for a in xs])
    m, n = len(xs), len(ys)
    A = []
    b = []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n:(i + 1) * n] = 1
        A.append(row)
        b.append(px[i])
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1
        A.append(row)
        b.append(py[j])
    res = linprog(C.ravel(), A_eq=np.array(A), b_eq=np.array(b), bounds=(0, None), method="highs")
    return res.fun


cases = [
    ("a dog runs", "a cat sits on a mat"),
    ("dog dog cat", "a mat"),
    ("a dog runs on grass", "cat"),
]
for x, y in cases:
    print(repr(x), repr(y), "=", repr(wmd(x.split(), y.split())))
refs = {"i1": ["a dog runs", "cat sits"], "i2": ["a mat"], "i3": ["grass", "dog runs"]}
cands = {"i1": "a cat runs", "i2": "a mat", "i3": "dog sits"}
sims = [np.exp(-min(wmd(cands[k].split(), r.split()) for r in refs[k])) for k in sorted(refs)]
print("three-image report =", repr(float(np.mean(sims))))
