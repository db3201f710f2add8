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

"""Shared helpers for the reference computations in this directory.

Every script here is an independent re-implementation in numpy/scipy of a
quantity the C++ tests check. Their printed values are frozen into the tests.
"""
import numpy as np


def pattern(shape, salt):
    """Deterministic float32 weights: 0.5 * sin(1.3 * k + 0.7 * salt)."""
    n = int(np.prod(shape))
    k = np.arange(n, dtype=np.float64)
    return (0.5 * np.sin(1.3 * k + 0.7 * salt)).astype(np.float32).astype(np.float64).reshape(shape)


SALTS = {
    "embedding": 1,
    "gru.w_z": 2, "gru.w_r": 3, "gru.w_c": 4,
    "gru.u_z": 5, "gru.u_r": 6, "gru.u_c": 7,
    "gru.b_z": 8, "gru.b_r": 9, "gru.b_c": 10,
    "softmax.w": 11, "softmax.b": 12,
}


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru_step(x, h, p):
    z = sigmoid(x @ p["gru.w_z"] + h @ p["gru.u_z"] + p["gru.b_z"])
    r = sigmoid(x @ p["gru.w_r"] + h @ p["gru.u_r"] + p["gru.b_r"])
    c = np.tanh(x @ p["gru.w_c"] + (r * h) @ p["gru.u_c"] + p["gru.b_c"])
    return (1 - z) * h + z * c


def lm_params(v, e, h):
    shapes = {
        "embedding": (v, e),
        "gru.w_z": (e, h), "gru.w_r": (e, h), "gru.w_c": (e, h),
        "gru.u_z": (h, h), "gru.u_r": (h, h), "gru.u_c": (h, h),
        "gru.b_z": (h,), "gru.b_r": (h,), "gru.b_c": (h,),
        "softmax.w": (h, v), "softmax.b": (v,),
    }
    return {k: pattern(s, SALTS[k]) for k, s in shapes.items()}


def log_softmax(z):
    m = z.max()
    return z - m - np.log(np.exp(z - m).sum())
