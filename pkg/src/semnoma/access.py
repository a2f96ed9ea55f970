"""Downlink rate pairs for one S-user and one B-user under OMA, NOMA and semi-NOMA.

Semi-NOMA splits the band into a shared sub-band (fraction ``alpha``) where a
bit sub-stream is superimposed on the semantic stream, and an orthogonal
sub-band carrying the remaining bit sub-stream alone. The S-user removes the
bit sub-stream by SIC before decoding its semantic signal, so whenever a
semantic stream is present the shared bit sub-stream must be decodable at both
receivers. Without one the B-user decodes the shared sub-band on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from semnoma.channel import NoiseModel, sinr, snr
from semnoma.errors import AllocationError
from semnoma.rates import SemanticTextModel, bit_rate, semantic_rate

# relative slack on the power budget for float round-off
_BUDGET_RTOL = 1e-12
# sub-bands narrower than this fraction of the band carry no rate
MIN_BAND_FRACTION = 1e-12


class SchemeKind(str, enum.Enum):
    OMA = "OMA"
    NOMA = "NOMA"
    SEMI_NOMA = "semi-NOMA"

    def __str__(self) -> str:
        return self.value


class RatePair(NamedTuple):
    """Semantic rate of the S-user (suts/s) and bit rate of the B-user (bits/s)."""

    semantic: float
    bit: float


@dataclass(frozen=True)
class DownlinkScenario:
    s_gain: float
    b_gain: float
    total_power: float
    total_bandwidth: float
    noise: NoiseModel = field(default_factory=lambda: NoiseModel(1.0))
    semantic: SemanticTextModel = field(default_factory=SemanticTextModel)

    def __post_init__(self):
        if not (self.total_power > 0 and self.total_bandwidth > 0):
            raise ValueError("total power and bandwidth must be > 0")
        for g in (self.s_gain, self.b_gain):
            if not (math.isfinite(float(g)) and float(g) >= 0):
                raise ValueError("gains must be finite and >= 0")
        object.__setattr__(self, "s_gain", float(self.s_gain))
        object.__setattr__(self, "b_gain", float(self.b_gain))

    def scaled_power(self, factor: float) -> "DownlinkScenario":
        return DownlinkScenario(self.s_gain, self.b_gain, self.total_power * factor,
                                self.total_bandwidth, self.noise, self.semantic)


@dataclass(frozen=True)
class Allocation:
    """One semi-NOMA operating point.

    Attributes:
        shared_band_fraction: fraction of the band that is non-orthogonal.
        semantic_power: power of the semantic stream on the shared band.
        bit_power_shared: power of the superimposed bit sub-stream.
        bit_power_orth: power of the bit sub-stream on the orthogonal band.
    """

    shared_band_fraction: float
    semantic_power: float
    bit_power_shared: float
    bit_power_orth: float

    @property
    def total_power(self) -> float:
        return self.semantic_power + self.bit_power_shared + self.bit_power_orth


def validate_allocation(scenario: DownlinkScenario, alloc: Allocation,
                        scheme: SchemeKind = SchemeKind.SEMI_NOMA) -> str | None:
    """Return ``None`` if the allocation is valid for ``scheme``, else a reason."""
    a = alloc.shared_band_fraction
    powers = (alloc.semantic_power, alloc.bit_power_shared, alloc.bit_power_orth)
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in (a, *powers)):
        return "allocation fields must be finite numbers"
    if not 0 <= a <= 1:
        return f"shared band fraction {a} outside [0, 1]"
    if min(powers) < 0:
        return "powers must be >= 0"
    if alloc.total_power > scenario.total_power * (1 + _BUDGET_RTOL):
        return f"power sum {alloc.total_power} exceeds budget {scenario.total_power}"
    if a == 1 and alloc.bit_power_orth > 0:
        return "power on the orthogonal sub-band but it has zero width"
    if a == 0 and (alloc.semantic_power > 0 or alloc.bit_power_shared > 0):
        return "power on the shared sub-band but it has zero width"
    scheme = SchemeKind(scheme)
    if scheme is SchemeKind.OMA and alloc.bit_power_shared > 0:
        return "OMA cannot superimpose bits on the semantic sub-band"
    if scheme is SchemeKind.NOMA:
        if a != 1:
            return "NOMA shares the whole band (shared_band_fraction must be 1)"
        if alloc.bit_power_orth > 0:
            return "NOMA has no orthogonal sub-band"
    return None


def semi_noma_rates(scenario: DownlinkScenario, alpha, p_s, p_bn, p_bo):
    """Vectorised semi-NOMA evaluation; returns (semantic, bit) arrays.

    Inputs broadcast against each other and are assumed valid.
    """
    W, n0 = scenario.total_bandwidth, scenario.noise.n0
    g_s, g_b = scenario.s_gain, scenario.b_gain
    alpha, p_s, p_bn, p_bo = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, p_s, p_bn, p_bo)))
    w_n = np.where(alpha >= MIN_BAND_FRACTION, alpha * W, 0.0)
    w_o = np.where(1.0 - alpha >= MIN_BAND_FRACTION, (1.0 - alpha) * W, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # zero-width bands carry no power (validated), so 0/0 resolves to 0
        sinr_b = np.where(w_n > 0, p_bn * g_b / (p_s * g_b + w_n * n0), 0.0)
        sinr_s = np.where(w_n > 0, p_bn * g_s / (p_s * g_s + w_n * n0), 0.0)
        snr_sem = np.where(w_n > 0, p_s * g_s / (w_n * n0), 0.0)
        snr_orth = np.where(w_o > 0, p_bo * g_b / (w_o * n0), 0.0)
    # the S-user only has to decode the bit sub-stream when it has a semantic stream to recover
    r_shared = bit_rate(w_n, np.where(p_s > 0, np.minimum(sinr_b, sinr_s), sinr_b))
    semantic = semantic_rate(scenario.semantic, w_n, snr_sem, p_s > 0)
    bits = r_shared + bit_rate(w_o, snr_orth)
    return semantic, bits


def evaluate_semi_noma(scenario: DownlinkScenario, alloc: Allocation) -> RatePair:
    reason = validate_allocation(scenario, alloc, SchemeKind.SEMI_NOMA)
    if reason:
        raise AllocationError(reason)
    s, b = semi_noma_rates(scenario, alloc.shared_band_fraction, alloc.semantic_power,
                           alloc.bit_power_shared, alloc.bit_power_orth)
    return RatePair(float(s), float(b))


def _check_budget(scenario: DownlinkScenario, *powers: float) -> None:
    if min(powers) < 0:
        raise AllocationError("powers must be >= 0")
    if sum(powers) > scenario.total_power * (1 + _BUDGET_RTOL):
        raise AllocationError(f"power sum {sum(powers)} exceeds budget {scenario.total_power}")


def evaluate_noma(scenario: DownlinkScenario, semantic_power: float, bit_power: float) -> RatePair:
    """Pure NOMA: both streams superimposed over the whole band.

    The bit stream is decoded first at the S-user (bits-to-semantics SIC), so
    while a semantic stream is present its rate is limited by the weaker of
    the two SINRs.
    """
    _check_budget(scenario, semantic_power, bit_power)
    W, noise = scenario.total_bandwidth, scenario.noise
    sinr_b = sinr(bit_power, scenario.b_gain, semantic_power, scenario.b_gain, W, noise)
    sinr_s = sinr(bit_power, scenario.s_gain, semantic_power, scenario.s_gain, W, noise)
    sem = semantic_rate(scenario.semantic, W, snr(semantic_power, scenario.s_gain, W, noise),
                        semantic_power > 0)
    decodable = min(sinr_b, sinr_s) if semantic_power > 0 else sinr_b
    return RatePair(float(sem), float(bit_rate(W, decodable)))


def evaluate_oma(scenario: DownlinkScenario, band_fraction: float,
                 semantic_power: float, bit_power: float) -> RatePair:
    """OMA: S-user alone on ``band_fraction`` of the band, B-user on the rest."""
    if not 0 <= band_fraction <= 1:
        raise AllocationError(f"band fraction {band_fraction} outside [0, 1]")
    _check_budget(scenario, semantic_power, bit_power)
    W, noise = scenario.total_bandwidth, scenario.noise
    w_s = band_fraction * W
    w_b = (1.0 - band_fraction) * W
    if (w_s == 0 and semantic_power > 0) or (w_b == 0 and bit_power > 0):
        raise AllocationError("power assigned to a zero-width band")
    sem = 0.0
    if band_fraction >= MIN_BAND_FRACTION:
        sem = semantic_rate(scenario.semantic, w_s, snr(semantic_power, scenario.s_gain, w_s, noise),
                            semantic_power > 0)
    bits = 0.0
    if 1.0 - band_fraction >= MIN_BAND_FRACTION:
        bits = bit_rate(w_b, snr(bit_power, scenario.b_gain, w_b, noise))
    return RatePair(float(sem), float(bits))


def evaluate(scenario: DownlinkScenario, scheme: SchemeKind, alloc: Allocation) -> RatePair:
    """Dispatch an :class:`Allocation` to the evaluator of ``scheme``."""
    reason = validate_allocation(scenario, alloc, scheme)
    if reason:
        raise AllocationError(reason)
    scheme = SchemeKind(scheme)
    if scheme is SchemeKind.OMA:
        return evaluate_oma(scenario, alloc.shared_band_fraction, alloc.semantic_power, alloc.bit_power_orth)
    if scheme is SchemeKind.NOMA:
        return evaluate_noma(scenario, alloc.semantic_power, alloc.bit_power_shared)
    return evaluate_semi_noma(scenario, alloc)
