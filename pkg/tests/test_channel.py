import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semnoma.channel import (
    FadingEnsemble,
    FadingSampler,
    LinkGain,
    NoiseModel,
    sample_fading,
    sinr,
    snr,
)

pos = st.floats(min_value=1e-6, max_value=1e6)
nonneg = st.floats(min_value=0.0, max_value=1e6)


def test_single_sample_ensemble():
    ens = sample_fading(FadingSampler(1.0), FadingSampler(1.0), 1, seed=5)
    assert len(ens) == 1
    assert ens.weights.tolist() == [1.0]


def test_sampling_is_deterministic():
    a = sample_fading(FadingSampler(1.0, 3), FadingSampler(2.0, 4), 50, seed=11)
    b = sample_fading(FadingSampler(1.0, 3), FadingSampler(2.0, 4), 50, seed=11)
    assert a.primary_gains.tobytes() == b.primary_gains.tobytes()
    assert a.secondary_gains.tobytes() == b.secondary_gains.tobytes()
    c = sample_fading(FadingSampler(1.0, 3), FadingSampler(2.0, 4), 50, seed=12)
    assert not np.array_equal(a.primary_gains, c.primary_gains)


def test_primary_and_secondary_streams_differ():
    ens = sample_fading(FadingSampler(1.0), FadingSampler(1.0), 100, seed=0)
    assert not np.array_equal(ens.primary_gains, ens.secondary_gains)


def test_empirical_mean_matches():
    n = 100_000
    ens = sample_fading(FadingSampler(2.0), FadingSampler(0.5), n, seed=1)
    assert 1.9 <= ens.primary_gains.mean() <= 2.1
    assert abs(ens.secondary_gains.mean() - 0.5) <= 5 / math.sqrt(n) * 0.5
    # exponential power gain: variance equals mean squared
    assert ens.primary_gains.var() == pytest.approx(4.0, rel=0.05)


def test_zero_states_rejected():
    with pytest.raises(ValueError):
        sample_fading(FadingSampler(1.0), FadingSampler(1.0), 0, seed=0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf])
def test_sampler_mean_must_be_positive(bad):
    with pytest.raises(ValueError):
        FadingSampler(bad)


def test_ensemble_weight_validation():
    with pytest.raises(ValueError):
        FadingEnsemble(np.ones(2), np.ones(2), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        FadingEnsemble(np.ones(0), np.ones(0), np.ones(0))
    ens = FadingEnsemble.from_states([(1.0, 2.0), (3.0, 4.0)])
    assert ens.states == [(1.0, 2.0), (3.0, 4.0)]
    assert ens.mean([1.0, 3.0]) == 2.0


def test_link_gain_and_noise_invariants():
    assert float(LinkGain(0.0)) == 0.0
    with pytest.raises(ValueError):
        LinkGain(-1e-3)
    with pytest.raises(ValueError):
        NoiseModel(0.0)


def test_snr_examples():
    assert snr(0.0, 1.0, 1.0, NoiseModel(1.0)) == 0.0
    assert snr(1.0, 1.0, 1.0, NoiseModel(1.0)) == 1.0
    assert snr(2.0, LinkGain(0.5), 1e6, NoiseModel(1e-9)) == pytest.approx(1000.0, rel=1e-12)
    with pytest.raises(ValueError):
        snr(1.0, 1.0, 0.0, NoiseModel(1.0))


def test_sinr_examples():
    n = NoiseModel(1.0)
    assert sinr(3.0, 2.0, 0.0, 5.0, 2.0, n) == snr(3.0, 2.0, 2.0, n)
    assert sinr(1.0, 1.0, 1.0, 1.0, 1.0, n) == 0.5
    with pytest.raises(ValueError):
        sinr(1.0, 1.0, 1.0, 1.0, -1.0, n)


@settings(max_examples=300)
@given(p=nonneg, g=nonneg, ip=nonneg, ig=nonneg, w=pos)
def test_sinr_never_exceeds_snr(p, g, ip, ig, w):
    n = NoiseModel(1e-3)
    s = snr(p, g, w, n)
    x = sinr(p, g, ip, ig, w, n)
    assert 0 <= x <= s
    assert math.isfinite(x)


@settings(max_examples=200)
@given(p=nonneg, dp=nonneg, g=nonneg, ip=nonneg, dip=nonneg, w=pos)
def test_ratio_monotonicity(p, dp, g, ip, dip, w):
    n = NoiseModel(0.1)
    assert snr(p + dp, g, w, n) >= snr(p, g, w, n)
    assert sinr(p + dp, g, ip, 1.0, w, n) >= sinr(p, g, ip, 1.0, w, n)
    assert sinr(p, g, ip + dip, 1.0, w, n) <= sinr(p, g, ip, 1.0, w, n)
