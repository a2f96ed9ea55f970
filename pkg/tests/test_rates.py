import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semnoma.rates import (
    BitEquivalence,
    SemanticTextModel,
    bit_rate,
    bit_to_equiv_semantic,
    equiv_semantic_to_bit,
    semantic_rate,
    semantic_similarity,
)

# crossover SNR where 0.5 * eps(g) == 0.05 * log2(1 + g) with default parameters,
# found by bisection on independently written formulas
CROSSOVER_SNR = 852.9659566501037


def test_similarity_upper_asymptote(model):
    assert semantic_similarity(model, 1e12) == pytest.approx(model.logistic_upper, abs=1e-6)


def test_similarity_midpoint(model):
    # 0.25 * 10 dB - 2.5 = 0
    eps = semantic_similarity(model, 10.0)
    assert eps == model.logistic_lower + (model.logistic_upper - model.logistic_lower) * 0.5
    assert eps == pytest.approx((model.logistic_lower + model.logistic_upper) / 2, abs=1e-15)


def test_similarity_bounds_and_monotone_grid(model):
    grid = np.logspace(-6, 8, 1000)
    eps = semantic_similarity(model, grid)
    assert np.all(np.diff(eps) >= 0)
    assert eps.min() >= model.logistic_lower and eps.max() <= model.logistic_upper


def test_similarity_rejects_negative_snr(model):
    with pytest.raises(ValueError):
        semantic_similarity(model, -1.0)


def test_zero_snr_is_finite(model):
    eps0 = semantic_similarity(model, 0.0)
    assert model.logistic_lower <= eps0 < model.logistic_lower + 1e-6


def test_semantic_rate_examples():
    pinned = SemanticTextModel(20, 10, 4, logistic_lower=0.999999999, logistic_upper=1.0)
    assert semantic_rate(pinned, 1e6, 5.0) == pytest.approx(5e5, rel=1e-8)
    assert semantic_rate(pinned, 0.0, 5.0) == 0.0
    assert semantic_rate(pinned, 1e6, 5.0, transmitting=False) == 0.0


def test_semantic_rate_linear_in_bandwidth(model):
    assert semantic_rate(model, 2e6, 7.0) == pytest.approx(2 * semantic_rate(model, 1e6, 7.0), rel=1e-15)
    with pytest.raises(ValueError):
        semantic_rate(model, -1.0, 1.0)


def test_bit_rate_examples():
    assert bit_rate(1.0, 1.0) == 1.0
    assert bit_rate(1e6, 3.0) == 2e6
    assert bit_rate(1e6, 0.0) == 0.0
    assert bit_rate(0.0, 5.0) == 0.0
    with pytest.raises(ValueError):
        bit_rate(-1.0, 1.0)
    with pytest.raises(ValueError):
        bit_rate(1.0, -1.0)


def test_bit_to_semantic_examples(model):
    conv = BitEquivalence(40)
    assert bit_to_equiv_semantic(0.0, model, conv) == 0.0
    assert bit_to_equiv_semantic(4e5, model, conv) == pytest.approx(2e4, rel=1e-15)
    x = 123456.789
    back = equiv_semantic_to_bit(bit_to_equiv_semantic(x, model, conv), model, conv)
    assert back == pytest.approx(x, rel=1e-12)


@given(a=st.floats(0, 1e9), b=st.floats(0, 1e9))
def test_bit_to_semantic_additive(a, b):
    m, c = SemanticTextModel(), BitEquivalence()
    assert bit_to_equiv_semantic(a + b, m, c) == pytest.approx(
        bit_to_equiv_semantic(a, m, c) + bit_to_equiv_semantic(b, m, c), rel=1e-12, abs=1e-9)


def test_semantic_beats_bit_only_below_crossover(model):
    conv = BitEquivalence()
    W = 1e6
    for g in (1.0, 100.0, CROSSOVER_SNR * 0.99):
        assert semantic_rate(model, W, g) > bit_to_equiv_semantic(bit_rate(W, g), model, conv)
    for g in (CROSSOVER_SNR * 1.01, 1e4, 1e8):
        assert semantic_rate(model, W, g) < bit_to_equiv_semantic(bit_rate(W, g), model, conv)


@pytest.mark.parametrize("kwargs", [
    dict(logistic_lower=0.5, logistic_upper=0.5),
    dict(logistic_upper=1.1),
    dict(logistic_slope=0.0),
    dict(words_per_sentence=0.0),
])
def test_model_validation(kwargs):
    with pytest.raises(ValueError):
        SemanticTextModel(**kwargs)


def test_ceiling(model):
    assert model.rate_ceiling(1e6) == pytest.approx(20 * 1e6 / 40 * 0.98)
    assert semantic_rate(model, 1e6, 1e15) <= model.rate_ceiling(1e6) * (1 + 1e-12)
    assert math.isclose(model.suts_per_symbol, 0.5)
