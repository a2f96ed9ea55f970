import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semnoma.access import (
    MIN_BAND_FRACTION,
    Allocation,
    DownlinkScenario,
    RatePair,
    SchemeKind,
    evaluate,
    evaluate_noma,
    evaluate_oma,
    evaluate_semi_noma,
    validate_allocation,
)
from semnoma.channel import NoiseModel
from semnoma.errors import AllocationError
from semnoma.rates import bit_rate

frac = st.floats(0.0, 1.0)
ratio = st.floats(0.05, 20.0)


def scenario(r=1.0, P=1.0):
    return DownlinkScenario(1e-13 * r, 1e-13, P, 1e6, NoiseModel(4e-21))


def rel_close(a, b, rtol=1e-12):
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def test_validation_rules(downlink):
    assert validate_allocation(downlink, Allocation(0.5, 0.2, 0.3, 0.5), SchemeKind.NOMA)
    assert validate_allocation(downlink, Allocation(0.5, 0.2, 0.3, 0.5), SchemeKind.SEMI_NOMA) is None
    assert validate_allocation(downlink, Allocation(0.5, 0.2, 0.1, 0.5), SchemeKind.OMA)
    assert validate_allocation(downlink, Allocation(0.5, 0.2, 0.0, 0.8), SchemeKind.OMA) is None
    assert validate_allocation(downlink, Allocation(1.0, 0.5, 0.5, 0.0), SchemeKind.NOMA) is None
    assert validate_allocation(downlink, Allocation(1.0, 0.5, 0.4, 0.1), SchemeKind.NOMA)
    assert "budget" in validate_allocation(downlink, Allocation(0.5, 0.5, 0.5, 0.5))
    assert validate_allocation(downlink, Allocation(1.0, 0.5, 0.0, 0.1))  # power on empty orthogonal band
    assert validate_allocation(downlink, Allocation(0.0, 0.1, 0.0, 0.5))  # power on empty shared band
    assert validate_allocation(downlink, Allocation(1.2, 0.1, 0.0, 0.5))
    assert validate_allocation(downlink, Allocation(0.5, -0.1, 0.0, 0.5))
    assert validate_allocation(downlink, Allocation(math.nan, 0.1, 0.0, 0.5))


def test_invalid_allocation_raises(downlink):
    with pytest.raises(AllocationError, match="budget"):
        evaluate_semi_noma(downlink, Allocation(0.5, 0.6, 0.6, 0.0))
    with pytest.raises(AllocationError):
        evaluate_noma(downlink, 0.7, 0.7)
    with pytest.raises(AllocationError):
        evaluate_oma(downlink, 0.5, 0.7, 0.7)


def test_semantic_silent_degenerates_to_bit_only(downlink):
    W, n0 = downlink.total_bandwidth, downlink.noise.n0
    r = evaluate_semi_noma(downlink, Allocation(1.0, 0.0, 1.0, 0.0))
    assert r.semantic == 0.0
    assert r.bit == bit_rate(W, 1.0 * downlink.b_gain / (W * n0))


def test_noma_examples(downlink):
    W, n0 = downlink.total_bandwidth, downlink.noise.n0
    full_sem = evaluate_noma(downlink, 1.0, 0.0)
    assert full_sem.bit == 0.0
    assert full_sem.semantic > 0
    only_bits = evaluate_noma(downlink, 0.0, 1.0)
    assert only_bits.semantic == 0.0
    assert only_bits.bit == evaluate_oma(downlink, 0.0, 0.0, 1.0).bit


@settings(max_examples=200)
@given(u=st.floats(0.01, 0.99), r=ratio)
def test_noma_interference_strictly_hurts_bits(u, r):
    scn = scenario(r)
    W, n0 = scn.total_bandwidth, scn.noise.n0
    got = evaluate_noma(scn, u, 1 - u)
    assert got.bit < bit_rate(W, (1 - u) * scn.b_gain / (W * n0))


def test_oma_examples(downlink):
    assert evaluate_oma(downlink, 1.0, 1.0, 0.0).bit == 0.0
    with pytest.raises(AllocationError):
        evaluate_oma(downlink, 1.0, 0.5, 0.5)
    r = evaluate_oma(downlink, 0.5, 0.5, 0.5)
    # same SNR per Hz for both users when gains, powers and bands match
    W, n0 = downlink.total_bandwidth, downlink.noise.n0
    snr = 0.5 * 1e-13 / (0.5 * W * n0)
    assert r.bit == bit_rate(0.5 * W, snr)


def test_symmetric_gains_make_min_inactive():
    scn = scenario(1.0)
    a = Allocation(0.6, 0.3, 0.4, 0.3)
    r = evaluate_semi_noma(scn, a)
    W, n0 = scn.total_bandwidth, scn.noise.n0
    wn = 0.6 * W
    sinr_b = 0.4 * scn.b_gain / (0.3 * scn.b_gain + wn * n0)
    expected_bits = bit_rate(wn, sinr_b) + bit_rate(0.4 * W, 0.3 * scn.b_gain / (0.4 * W * n0))
    assert r.bit == pytest.approx(expected_bits, rel=1e-14)


@settings(max_examples=300)
@given(r=ratio, u=frac, P=st.floats(0.01, 10))
def test_noma_reproduced_by_semi_noma(r, u, P):
    scn = scenario(r, P)
    noma = evaluate_noma(scn, u * P, (1 - u) * P)
    semi = evaluate_semi_noma(scn, Allocation(1.0, u * P, (1 - u) * P, 0.0))
    assert rel_close(noma.semantic, semi.semantic) and rel_close(noma.bit, semi.bit)


@settings(max_examples=300)
@given(r=ratio, a=frac, u=frac, P=st.floats(0.01, 10))
def test_oma_reproduced_by_semi_noma(r, a, u, P):
    scn = scenario(r, P)
    ps = u * P if a > 0 else 0.0
    pb = (1 - u) * P if a < 1 else 0.0
    oma = evaluate_oma(scn, a, ps, pb)
    semi = evaluate_semi_noma(scn, Allocation(a, ps, 0.0, pb))
    assert rel_close(oma.semantic, semi.semantic) and rel_close(oma.bit, semi.bit)


@settings(max_examples=300)
@given(r=ratio, a=frac, u=frac, v=frac)
def test_shared_bits_decodable_at_s_user(r, a, u, v):
    scn = scenario(r)
    W, n0 = scn.total_bandwidth, scn.noise.n0
    ps, pbn = u, v * (1 - u)
    pbo = (1 - u) * (1 - v)
    alloc = Allocation(a, ps if a > 0 else 0.0, pbn if a > 0 else 0.0, pbo if a < 1 else 0.0)
    with np.errstate(over="raise"):
        res = evaluate_semi_noma(scn, alloc)
    assert math.isfinite(res.semantic) and math.isfinite(res.bit)
    assert res.semantic >= 0 and res.bit >= 0
    no_shared = evaluate_semi_noma(scn, Allocation(a, alloc.semantic_power, 0.0, alloc.bit_power_orth))
    r_shared = res.bit - no_shared.bit
    if a >= MIN_BAND_FRACTION and alloc.semantic_power > 0:
        wn = a * W
        sinr_s = alloc.bit_power_shared * scn.s_gain / (alloc.semantic_power * scn.s_gain + wn * n0)
        assert r_shared <= bit_rate(wn, sinr_s) * (1 + 1e-12) + 1e-9
    elif a < MIN_BAND_FRACTION:
        assert r_shared == 0.0


def test_no_semantic_stream_means_no_sic_limit():
    # weak S-user: its channel must not cap the bit rate when it receives nothing
    scn = scenario(0.25)
    W, n0 = scn.total_bandwidth, scn.noise.n0
    alone = bit_rate(W, scn.total_power * scn.b_gain / (W * n0))
    assert evaluate_noma(scn, 0.0, scn.total_power).bit == pytest.approx(alone, rel=1e-12)
    assert evaluate_noma(scn, 1e-6, scn.total_power - 1e-6).bit < alone * 0.9


@settings(max_examples=200)
@given(r=ratio, a=st.floats(0.01, 0.99), u=frac, v=frac, k=st.floats(1.0, 5.0))
def test_more_power_never_hurts(r, a, u, v, k):
    scn = scenario(r)
    alloc = Allocation(a, u, v * (1 - u), (1 - u) * (1 - v))
    big = Allocation(a, *(k * x for x in (alloc.semantic_power, alloc.bit_power_shared, alloc.bit_power_orth)))
    lo = evaluate_semi_noma(scn, alloc)
    hi = evaluate_semi_noma(scn.scaled_power(k), big)
    assert hi.semantic >= lo.semantic * (1 - 1e-12)
    assert hi.bit >= lo.bit * (1 - 1e-12)


@pytest.mark.parametrize("a", [0.0, 1.0])
def test_zero_band_is_safe(a):
    scn = scenario(0.25)
    alloc = Allocation(a, 0.5 * a, 0.5 * a, 1.0 - a)
    with np.errstate(all="raise"):
        res = evaluate_semi_noma(scn, alloc)
    assert all(math.isfinite(x) for x in res)


def test_evaluate_dispatch(downlink):
    a = Allocation(0.3, 0.4, 0.0, 0.6)
    assert evaluate(downlink, SchemeKind.OMA, a) == evaluate_oma(downlink, 0.3, 0.4, 0.6)
    with pytest.raises(AllocationError):
        evaluate(downlink, SchemeKind.NOMA, a)
    assert isinstance(evaluate(downlink, "semi-NOMA", a), RatePair)
