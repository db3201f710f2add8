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

"""Monte-Carlo estimate of E[max(best - X, 0)], X ~ N(mean, std^2), 10^6 draws."""
import numpy as np

rng = np.random.default_rng(12345)
triples = [(0.0, 1.0, 0.0), (1.0, 0.5, 0.7), (-0.3, 2.0, 0.4), (2.0, 0.3, 2.5), (5.0, 1.5, 3.0)]
for mean, std, best in triples:
    x = rng.normal(mean, std, 10**6)
    print((mean, std, best), "=", repr(float(np.maximum(best - x, 0).mean())))
