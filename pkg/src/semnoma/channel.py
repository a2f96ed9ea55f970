"""Channel gains, noise, SNR/SINR arithmetic and Rayleigh fading ensembles.

Sampling uses numpy's ``Generator`` backed by ``PCG64``. Each sampler draws from
its own stream derived with ``SeedSequence([seed, sampler.seed, stream])`` so
the primary and secondary links are independent and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class LinkGain:
    """Linear power gain |h|^2 of one link."""

    gain: float

    def __post_init__(self):
        if not math.isfinite(self.gain) or self.gain < 0:
            raise ValueError(f"link gain must be finite and >= 0, got {self.gain}")

    def __float__(self) -> float:
        return float(self.gain)


@dataclass(frozen=True)
class NoiseModel:
    """White noise with power spectral density ``n0`` in W/Hz."""

    n0: float

    def __post_init__(self):
        if not (self.n0 > 0 and math.isfinite(self.n0)):
            raise ValueError(f"noise PSD must be > 0, got {self.n0}")

    def power(self, bandwidth):
        return bandwidth * self.n0


@dataclass(frozen=True)
class FadingSampler:
    """Rayleigh block fading: exponential power gain with mean ``mean_gain``."""

    mean_gain: float
    seed: int = 0

    def __post_init__(self):
        if not (self.mean_gain > 0 and math.isfinite(self.mean_gain)):
            raise ValueError(f"mean gain must be > 0, got {self.mean_gain}")
        if self.seed < 0:
            raise ValueError("sampler seed must be unsigned")

    def draw(self, n: int, seed: int, stream: int) -> np.ndarray:
        ss = np.random.SeedSequence([seed, self.seed, stream])
        rng = np.random.Generator(np.random.PCG64(ss))
        return self.mean_gain * rng.standard_exponential(n)


@dataclass(frozen=True, eq=False)
class FadingEnsemble:
    """A finite set of (primary, secondary) gain states with probabilities.

    Each state is one coherence block.
    """

    primary_gains: np.ndarray
    secondary_gains: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        gp = np.asarray(self.primary_gains, dtype=float)
        gs = np.asarray(self.secondary_gains, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if gp.ndim != 1 or gp.size == 0:
            raise ValueError("ensemble needs at least one state")
        if gs.shape != gp.shape or w.shape != gp.shape:
            raise ValueError("gain and weight arrays must have equal length")
        if np.any(gp < 0) or np.any(gs < 0) or not (np.all(np.isfinite(gp)) and np.all(np.isfinite(gs))):
            raise ValueError("gains must be finite and >= 0")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be >= 0 and sum to 1")
        for name, arr in (("primary_gains", gp), ("secondary_gains", gs), ("weights", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_states(cls, states, weights=None) -> "FadingEnsemble":
        arr = np.asarray([(float(a), float(b)) for a, b in states], dtype=float).reshape(-1, 2)
        n = len(arr)
        w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
        return cls(arr[:, 0], arr[:, 1], w)

    def __len__(self) -> int:
        return self.weights.size

    @property
    def states(self) -> list[tuple[float, float]]:
        return list(zip(self.primary_gains.tolist(), self.secondary_gains.tolist()))

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.states)

    def mean(self, values) -> float:
        """Probability-weighted average of per-state values."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def sample_fading(sampler_primary: FadingSampler, sampler_secondary: FadingSampler,
                  n: int, seed: int) -> FadingEnsemble:
    """Draw ``n`` equiprobable independent Rayleigh states."""
    if n < 1:
        raise ValueError(f"need n >= 1 fading states, got {n}")
    if seed < 0:
        raise ValueError("seed must be unsigned")
    gp = sampler_primary.draw(n, seed, 0)
    gs = sampler_secondary.draw(n, seed, 1)
    return FadingEnsemble(gp, gs, np.full(n, 1.0 / n))


def _check_bandwidth(bandwidth):
    if np.any(np.asarray(bandwidth) <= 0):
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")


def snr(power, gain, bandwidth, noise: NoiseModel):
    """Received SNR ``power * gain / (bandwidth * n0)``. Works on arrays."""
    _check_bandwidth(bandwidth)
    if np.any(np.asarray(power) < 0):
        raise ValueError("power must be >= 0")
    return power * _g(gain) / noise.power(bandwidth)


def sinr(power, gain, interference_power, interference_gain, bandwidth, noise: NoiseModel):
    """SINR with a single interferer treated as noise."""
    _check_bandwidth(bandwidth)
    if np.any(np.asarray(power) < 0) or np.any(np.asarray(interference_power) < 0):
        raise ValueError("powers must be >= 0")
    return power * _g(gain) / (interference_power * _g(interference_gain) + noise.power(bandwidth))


def _g(gain):
    return gain.gain if isinstance(gain, LinkGain) else gain
