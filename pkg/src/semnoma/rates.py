"""Semantic rate, Shannon bit rate and bit-to-semantic rate conversion.

Semantic rates are in semantic units per second (suts/s). One channel symbol
is sent per Hz per second, so a band of width W carries W/(k*L) sentences per
second when each word maps to k symbols and a sentence has L words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SNR_FLOOR = 1e-12


@dataclass(frozen=True)
class SemanticTextModel:
    """Text-source parameters and the logistic sentence-similarity fit.

    Attributes:
        suts_per_sentence: semantic units per sentence (I).
        words_per_sentence: average words per sentence (L).
        symbols_per_word: channel symbols per word (k).
        logistic_lower: lower asymptote of the similarity curve.
        logistic_upper: upper asymptote of the similarity curve.
        logistic_slope: slope per dB of received SNR.
        logistic_shift: offset added to ``slope * snr_db``.

    The defaults are desk-scale choices (S-shaped, midpoint at 10 dB), not
    values fitted to any particular transceiver.
    """

    suts_per_sentence: float = 20.0
    words_per_sentence: float = 10.0
    symbols_per_word: float = 4.0
    logistic_lower: float = 0.2
    logistic_upper: float = 0.98
    logistic_slope: float = 0.25
    logistic_shift: float = -2.5

    def __post_init__(self):
        if not 0 <= self.logistic_lower < self.logistic_upper <= 1:
            raise ValueError("need 0 <= logistic_lower < logistic_upper <= 1")
        if not self.logistic_slope > 0:
            raise ValueError("logistic_slope must be > 0")
        for name in ("suts_per_sentence", "words_per_sentence", "symbols_per_word"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def suts_per_symbol(self) -> float:
        return self.suts_per_sentence / (self.symbols_per_word * self.words_per_sentence)

    def rate_ceiling(self, bandwidth: float) -> float:
        """Semantic rate at perfect-quality reception (similarity = upper asymptote)."""
        return self.suts_per_symbol * bandwidth * self.logistic_upper


@dataclass(frozen=True)
class BitEquivalence:
    """Bits per word used to express a bit rate in suts/s."""

    bits_per_word: float = 40.0

    def __post_init__(self):
        if not self.bits_per_word > 0:
            raise ValueError("bits_per_word must be > 0")


def semantic_similarity(model: SemanticTextModel, snr):
    """Sentence similarity in [lower, upper] as a logistic function of SNR in dB."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("snr must be >= 0")
    snr_db = 10.0 * np.log10(np.maximum(snr, SNR_FLOOR))
    z = model.logistic_slope * snr_db + model.logistic_shift
    eps = model.logistic_lower + (model.logistic_upper - model.logistic_lower) / (1.0 + np.exp(-z))
    return eps[()] if eps.ndim == 0 else eps


def semantic_rate(model: SemanticTextModel, bandwidth, snr, transmitting=True):
    """Semantic rate in suts/s; zero when silent or on a zero-width band.

    The similarity fit does not pass through the origin, so ``transmitting``
    marks whether any power is actually spent on the semantic stream.
    """
    bandwidth = np.asarray(bandwidth, dtype=float)
    if np.any(bandwidth < 0):
        raise ValueError("bandwidth must be >= 0")
    active = np.asarray(transmitting, dtype=bool) & (bandwidth > 0)
    rate = np.where(active, model.suts_per_symbol * bandwidth * semantic_similarity(model, snr), 0.0)
    return rate[()] if rate.ndim == 0 else rate


def bit_rate(bandwidth, sinr):
    """Shannon rate ``bandwidth * log2(1 + sinr)`` in bits/s."""
    bandwidth = np.asarray(bandwidth, dtype=float)
    sinr = np.asarray(sinr, dtype=float)
    if np.any(bandwidth < 0) or np.any(sinr < 0):
        raise ValueError("bandwidth and sinr must be >= 0")
    rate = np.where(bandwidth > 0, bandwidth * np.log2(1.0 + sinr), 0.0)
    return rate[()] if rate.ndim == 0 else rate


def bit_to_equiv_semantic(rate_bits, model: SemanticTextModel, conv: BitEquivalence):
    """Convert bits/s to suts/s: bits -> words -> sentences -> suts."""
    if np.any(np.asarray(rate_bits) < 0):
        raise ValueError("bit rate must be >= 0")
    return rate_bits * model.suts_per_sentence / (model.words_per_sentence * conv.bits_per_word)


def equiv_semantic_to_bit(rate_suts, model: SemanticTextModel, conv: BitEquivalence):
    """Inverse of :func:`bit_to_equiv_semantic`."""
    return rate_suts * model.words_per_sentence * conv.bits_per_word / model.suts_per_sentence
