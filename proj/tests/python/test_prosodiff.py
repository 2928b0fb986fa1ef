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

import json

import numpy as np
import pytest

import prosodiff


def test_cosine_schedule_values():
    a = prosodiff.cosine_alpha_bars(200)
    assert len(a) == 201
    assert a[0] == 1.0
    assert a[1] == pytest.approx(0.9997450273636279, abs=1e-12)
    assert a[100] == pytest.approx(0.49384359044063775, abs=1e-12)
    assert all(x > y for x, y in zip(a, a[1:]))
    assert prosodiff.schedule_csv(3).splitlines()[0] == "t,beta,alpha,alpha_bar"


def test_forward_diffuse_matches_closed_form():
    rng = np.random.default_rng(0)
    x0 = rng.normal(size=(1, 3, 5))
    eps = rng.normal(size=(1, 3, 5))
    a = prosodiff.cosine_alpha_bars(50)[20]
    got = prosodiff.forward_diffuse(x0, 20, eps, 50)
    np.testing.assert_allclose(got, np.sqrt(a) * x0 + np.sqrt(1 - a) * eps, rtol=0, atol=1e-14)


def test_guidance_endpoints_and_rescale():
    rng = np.random.default_rng(1)
    eps_c = rng.normal(size=(2, 3, 6))
    eps_nc = rng.normal(size=(2, 3, 6))
    np.testing.assert_array_equal(prosodiff.cfg_combine(eps_c, eps_nc, 1.0), eps_c)
    np.testing.assert_array_equal(prosodiff.cfg_combine(eps_c, eps_nc, 0.0), eps_nc)
    combined = prosodiff.cfg_combine(eps_c, eps_nc, 4.0)
    np.testing.assert_allclose(combined, eps_nc + 4.0 * (eps_c - eps_nc), atol=1e-12)
    np.testing.assert_array_equal(prosodiff.rescale(combined, eps_c, 0.0), combined)
    full = prosodiff.rescale(combined, eps_c, 1.0)
    for b in range(2):
        assert full[b].std() == pytest.approx(eps_c[b].std(), rel=1e-12)
    half = prosodiff.rescale(combined, eps_c, 0.5)
    np.testing.assert_allclose(half, 0.5 * (combined + full), atol=1e-12)


def test_terminal_temperature():
    x1 = prosodiff.draw_terminal(4000, 1, 1.0, seed=3)
    x4 = prosodiff.draw_terminal(4000, 1, 4.0, seed=3)
    np.testing.assert_allclose(x4, 0.5 * x1, atol=1e-15)


def test_metrics():
    assert prosodiff.js_divergence([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) == pytest.approx(0.0, abs=1e-12)
    assert prosodiff.js_divergence([0.0] * 10, [5.0] * 10) == pytest.approx(np.log(2), abs=1e-6)
    assert prosodiff.coefficient_of_variation([1.0, 3.0]) == 50.0
    with pytest.raises(ValueError):
        prosodiff.coefficient_of_variation([])
    x = np.random.default_rng(2).normal(size=(3, 9))
    d = prosodiff.descriptor(x)
    assert len(d) == 21
    assert d[0] == pytest.approx(x[0].mean())


def test_config_round_trip():
    text = prosodiff.default_config()
    assert prosodiff.normalize_config(text) == text
    with pytest.raises(ValueError):
        prosodiff.normalize_config('{"diffusion_steps": 0}')


TINY = json.dumps({
    "seed": 5,
    "corpus": {"utterances_per_style": 8, "max_length": 10},
    "denoiser": {"residual_layers": 2, "hidden_channels": 8, "time_embedding_dim": 8,
                 "condition_dim": 8},
    "style": {"token_dim": 8, "heads": 2, "reference_channels": 4},
    "diffusion_steps": 10,
    "train": {"steps": 4, "batch_size": 4, "checkpoint_every": 2},
})


def test_corpus_is_deterministic(tmp_path):
    a = prosodiff.generate_corpus(TINY)
    b = prosodiff.generate_corpus(TINY)
    assert len(a.utterances) == 32
    for u, v in zip(a.utterances, b.utterances):
        assert u.phoneme_ids == v.phoneme_ids
        np.testing.assert_array_equal(u.prosody, v.prosody)
    a.save(str(tmp_path))
    c = prosodiff.load_corpus(str(tmp_path))
    assert c.validation == a.validation


def test_train_and_generate(tmp_path):
    corpus = prosodiff.generate_corpus(TINY)
    model, losses = prosodiff.train(TINY, corpus, str(tmp_path))
    assert len(losses) == 4 and model.step == 4
    loaded = prosodiff.Model.load(str(tmp_path / "model.bin"), TINY)
    ref = corpus.utterances[0]
    kwargs = dict(reference=ref.prosody, eta=3.0, seed=9)
    x = loaded.generate(ref.phoneme_ids, **kwargs)
    assert x.shape == (3, len(ref.phoneme_ids))
    np.testing.assert_array_equal(x, model.generate(ref.phoneme_ids, **kwargs))
    w = loaded.token_weights(ref.prosody)
    assert sum(w) == pytest.approx(1.0)
    y = loaded.generate(ref.phoneme_ids, token_weights=[0, 1, 0, 0], scale=[2.0, 1.0, 1.0])
    assert np.isfinite(y).all()
    z = loaded.generate(ref.phoneme_ids, token_weights=[0, 1, 0, 0])
    np.testing.assert_allclose(np.exp(y[0]), 2.0 * np.exp(z[0]), rtol=1e-12)
    with pytest.raises(ValueError):
        loaded.generate(ref.phoneme_ids, reference=ref.prosody, token_weights=[1, 0, 0, 0])
