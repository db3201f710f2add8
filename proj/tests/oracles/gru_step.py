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

"""One GRU step, scalar loops over the four gate equations (input 3, state 2)."""
import math

from common import pattern

E, H = 3, 2
P = {k: pattern(s, salt) for k, s, salt in [
    ("w_z", (E, H), 2), ("w_r", (E, H), 3), ("w_c", (E, H), 4),
    ("u_z", (H, H), 5), ("u_r", (H, H), 6), ("u_c", (H, H), 7),
    ("b_z", (H,), 8), ("b_r", (H,), 9), ("b_c", (H,), 10)]}
x = [0.3, -0.8, 0.5]
h = [0.4, -0.2]


def sig(v):
    return 1 / (1 + math.exp(-v))


z = [sig(sum(x[i] * P["w_z"][i, j] for i in range(E)) + sum(h[i] * P["u_z"][i, j] for i in range(H)) + P["b_z"][j]) for j in range(H)]
r = [sig(sum(x[i] * P["w_r"][i, j] for i in range(E)) + sum(h[i] * P["u_r"][i, j] for i in range(H)) + P["b_r"][j]) for j in range(H)]
c = [math.tanh(sum(x[i] * P["w_c"][i, j] for i in range(E)) + sum(r[i] * h[i] * P["u_c"][i, j] for i in range(H)) + P["b_c"][j]) for j in range(H)]
out = [(1 - z[j]) * h[j] + z[j] * c[j] for j in range(H)]
print("h_next =", ", ".join(repr(v) for v in out))
