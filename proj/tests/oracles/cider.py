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

"""CIDEr on a two-image corpus, from first principles.

n = 1..4; document frequency of an n-gram = number of images whose reference
set contains it; idf = log(N) - log(max(1, df)); tf = raw count; per n the
cosine between candidate and each reference; mean over n and references; x10.
"""
import math
from collections import Counter

refs = {
    "img1": ["a dog runs on the grass", "a brown dog is running"],
    "img2": ["a cat sits on a mat", "the cat is on the mat"],
}
cands = {"img1": "a dog is running on grass", "img2": "a cat on the mat"}


def ngrams(words, n):
    return Counter(tuple(words[i:i + n]) for i in range(len(words) - n + 1))


N = len(refs)
df = [Counter() for _ in range(5)]
for r in refs.values():
    for n in range(1, 5):
        seen = set()
        for s in r:
            seen |= set(ngrams(s.split(), n))
        for g in seen:
            df[n][g] += 1


def vec(words, n):
    return {g: c * (math.log(N) - math.log(max(1, df[n][g]))) for g, c in ngrams(words, n).items()}


def cos(a, b):
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    return sum(v * b.get(g, 0.0) for g, v in a.items()) / (na * nb)


scores = {}
for k in refs:
    c = cands[k].split()
    total = 0.0
    for n in range(1, 5):
        total += sum(cos(vec(c, n), vec(r.split(), n)) for r in refs[k]) / len(refs[k])
    scores[k] = 10 * total / 4
for k, v in scores.items():
    print(k, "=", repr(v))
print("corpus =", repr(sum(scores.values()) / N))
