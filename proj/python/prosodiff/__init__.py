# Copyright (c) 2026 The prosodiff Authors
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

"""Conditional diffusion model for phoneme-level prosody.

Arrays are float64 numpy arrays. Prosody has shape ``(3, L)`` with rows
log pitch, energy and log duration.
"""

from prosodiff._prosodiff import (
    Corpus,
    Model,
    Utterance,
    cfg_combine,
    coefficient_of_variation,
    cosine_alpha_bars,
    default_config,
    descriptor,
    draw_terminal,
    forward_diffuse,
    generate_corpus,
    js_divergence,
    load_corpus,
    normalize_config,
    pooled_js,
    rescale,
    schedule_csv,
    train,
)

__all__ = [
    "Corpus",
    "Model",
    "Utterance",
    "cfg_combine",
    "coefficient_of_variation",
    "cosine_alpha_bars",
    "default_config",
    "descriptor",
    "draw_terminal",
    "forward_diffuse",
    "generate_corpus",
    "js_divergence",
    "load_corpus",
    "normalize_config",
    "pooled_js",
    "rescale",
    "schedule_csv",
    "train",
]
